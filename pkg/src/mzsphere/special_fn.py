"""Scalar special functions on [-1, 1].

Gamma and binomials, Jacobi and Gegenbauer polynomials by forward
three-term recurrence, the Szegő oscillatory asymptotic of the kernel
Jacobi polynomial, and the Funk–Hecke symbol of a zonal profile.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from ._errors import DomainError


class PrecisionWarning(UserWarning):
    pass


class JacobiIndex(NamedTuple):
    alpha: float
    beta: float

    def check(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise DomainError(f"Jacobi index must satisfy alpha, beta > -1, got {tuple(self)}")
        return self


def kernel_index(d: int) -> JacobiIndex:
    """Index (1 + lam, lam), lam = (d - 2) / 2, of the reproducing-kernel polynomial."""
    lam = (d - 2) / 2
    return JacobiIndex(1 + lam, lam)


@dataclass(frozen=True)
class ZonalProfile:
    """A function g of t = <u, N> on [-1, 1] living on S^d.

    ``degree`` is set when g is a polynomial (so exact Gauss rules can be
    sized); ``lower`` marks g as vanishing for t < lower, in which case
    integrals are taken over the polar cap only.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    d: int
    degree: Optional[int] = None
    lower: Optional[float] = None

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))


def gamma_fn(x: float) -> float:
    if x <= 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    if x > 171.6:
        # Gamma(x) exceeds the largest double here; use log_gamma instead
        raise OverflowError(f"Gamma({x}) is not representable as a double; use log_gamma")
    return math.gamma(x)


def log_gamma(x: float) -> float:
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def generalized_binomial(a: float, k: int) -> float:
    """Binomial coefficient C(a, k) for real upper argument a."""
    k = int(k)
    if k < 0:
        raise DomainError("k must be a nonnegative integer")
    if float(a).is_integer() and a >= k:
        return float(math.comb(int(a), k))
    if a - k + 1 <= 0:
        raise DomainError(f"C({a}, {k}) hits a pole of Gamma in the denominator")
    return math.exp(math.lgamma(a + 1) - math.lgamma(k + 1) - math.lgamma(a - k + 1))


def _as_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + 1e-12):
        raise DomainError("argument must lie in [-1, 1]")
    return t


def jacobi_all(idx, n: int, t) -> np.ndarray:
    """P_k^{(a,b)}(t) for k = 0..n, stacked on a new leading axis."""
    a, b = JacobiIndex(*idx).check()
    t = _as_t(t)
    out = np.empty((n + 1,) + t.shape)
    out[0] = 1.0
    if n == 0:
        return out
    out[1] = 0.5 * (a + b + 2) * t + 0.5 * (a - b)
    ab = a + b
    for k in range(2, n + 1):
        c = 2 * k + ab
        a1 = 2 * k * (k + ab) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * t + a * a - b * b)
        a3 = 2 * (k + a - 1) * (k + b - 1) * c
        out[k] = (a2 * out[k - 1] - a3 * out[k - 2]) / a1
    return out


def jacobi_eval(idx, n: int, t):
    """P_n^{(alpha,beta)}(t) by the forward three-term recurrence."""
    a, b = JacobiIndex(*idx).check()
    t = _as_t(t)
    p0 = np.ones_like(t)
    if n == 0:
        return p0 if p0.ndim else float(p0)
    p1 = 0.5 * (a + b + 2) * t + 0.5 * (a - b)
    ab = a + b
    for k in range(2, n + 1):
        c = 2 * k + ab
        a1 = 2 * k * (k + ab) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * t + a * a - b * b)
        a3 = 2 * (k + a - 1) * (k + b - 1) * c
        p0, p1 = p1, (a2 * p1 - a3 * p0) / a1
    return p1 if np.ndim(p1) else float(p1)


def gegenbauer_all(lambda_g: float, n: int, t) -> np.ndarray:
    if lambda_g <= 0:
        raise DomainError("gegenbauer_eval requires lambda_g > 0")
    t = _as_t(t)
    out = np.empty((n + 1,) + t.shape)
    out[0] = 1.0
    if n == 0:
        return out
    out[1] = 2 * lambda_g * t
    for k in range(2, n + 1):
        out[k] = (2 * t * (k + lambda_g - 1) * out[k - 1] - (k + 2 * lambda_g - 2) * out[k - 2]) / k
    return out


def gegenbauer_eval(lambda_g: float, n: int, t):
    """C_n^{lambda_g}(t) by its three-term recurrence."""
    v = gegenbauer_all(lambda_g, n, t)[n]
    return v if v.ndim else float(v)


def szego_main_term(L: int, d: int, theta: float, c: float = 1.0):
    """Leading oscillatory term of P_L^{(1+lam,lam)}(cos theta) and its error envelope.

    Returns ``(main, error_envelope)`` where
    ``main = k(theta) / sqrt(L) * cos((L + lam + 1) theta + gamma)`` and the
    envelope is ``k(theta) / (sqrt(L) * L * sin(theta))``.
    """
    if not (c / L <= theta <= math.pi - c / L):
        raise DomainError(f"theta={theta} outside the window [{c}/L, pi - {c}/L]")
    lam = (d - 2) / 2
    k = (math.sin(theta / 2) ** (-lam - 1.5) * math.cos(theta / 2) ** (-lam - 0.5)) / math.sqrt(math.pi)
    gamma = -(lam + 1.5) * math.pi / 2
    main = k / math.sqrt(L) * math.cos((L + lam + 1) * theta + gamma)
    return main, k / (math.sqrt(L) * L * math.sin(theta))


def _gegenbauer_normalized(d: int, ell: int, t):
    """C_ell^{(d-1)/2}(t) / C_ell^{(d-1)/2}(1)."""
    lg = (d - 1) / 2
    return gegenbauer_all(lg, ell, t)[ell] / generalized_binomial(ell + 2 * lg - 1, ell)


def funk_hecke_symbol(g: ZonalProfile, ell: int, d: Optional[int] = None, rule=None) -> float:
    """Eigenvalue of f -> g * f on the degree-ell harmonics of S^d.

    sigma(S^{d-1}) * int_{-1}^{1} g(t) C_ell(t)/C_ell(1) (1 - t^2)^{(d-2)/2} dt,
    with C_ell the Gegenbauer polynomial of index (d - 1)/2.
    """
    from .sphere import surface_area, zonal_rule, theta_rule

    d = g.d if d is None else d
    if d < 2:
        raise DomainError("funk_hecke_symbol needs d >= 2")
    s_dm1 = surface_area(d - 1)
    if g.lower is not None:
        # profile supported on a polar cap: integrate in the colatitude
        # node count rounded up to a multiple of 16 so nearby ell share a cached rule
        n = max(48, 16 * math.ceil((ell + 16) / 16))
        th, w = theta_rule(math.acos(max(-1.0, min(1.0, g.lower))), n)
        t = np.cos(th)
        vals = g(t) * _gegenbauer_normalized(d, ell, t) * np.sin(th) ** (d - 1)
        return float(s_dm1 * np.dot(w, vals))
    if rule is None:
        deg = (g.degree if g.degree is not None else 2 * ell + 64) + ell
        rule = zonal_rule(d, deg // 2 + 1)
    elif g.degree is not None and rule.exactness_degree < g.degree + ell:
        warnings.warn(
            f"rule exact to degree {rule.exactness_degree} < {g.degree + ell} needed",
            PrecisionWarning,
            stacklevel=2,
        )
    t = rule.nodes
    return float(s_dm1 * np.dot(rule.weights, g(t) * _gegenbauer_normalized(d, ell, t)))
