"""The space Pi_L of spherical harmonics of degree <= L.

Real orthonormal basis on S^2 in canonical order: degrees ascending and,
within degree ell, m = 0, 1c, 1s, 2c, 2s, ..., where ``c``/``s`` stand for
the cos(m phi)/sin(m phi) factors. For d != 2 only zonal objects (kernel,
dimensions, L^p norms of kernel sections) are available.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from ._errors import PrecisionError, UnsupportedDimensionError
from .linalg import golub_welsch
from .special_fn import generalized_binomial, jacobi_all, jacobi_eval, kernel_index
from .sphere import as_points, surface_area


def dim_h(d: int, ell: int) -> int:
    if d < 1:
        raise ValueError("d must be >= 1")
    if ell == 0:
        return 1
    return (2 * ell + d - 1) * math.comb(d + ell - 1, ell) // (ell + d - 1)


def dim_pi(d: int, L: int) -> int:
    if d < 1:
        raise ValueError("d must be >= 1")
    return (d + 2 * L) * math.comb(d + L - 1, L) // d


def kernel_constant(d: int, L: int) -> float:
    """C_{d,L} = C(d+L-1, L) / C(L + (d-2)/2, L)."""
    return math.comb(d + L - 1, L) / generalized_binomial(L + (d - 2) / 2, L)


def kernel_profile(d: int, L: int, t):
    """K_L as a function of t = <u, v>."""
    return kernel_constant(d, L) / surface_area(d) * jacobi_eval(kernel_index(d), L, t)


def eval_kernel(d: int, L: int, u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != d + 1 or v.shape[-1] != d + 1:
        raise ValueError(f"points must live in R^{d + 1}")
    t = np.clip(np.sum(u * v, axis=-1), -1.0, 1.0)
    return kernel_profile(d, L, t)


@dataclass(frozen=True)
class HarmonicBasis:
    """Canonical real orthonormal basis of Pi_L on S^2."""

    L: int
    d: int = 2
    labels: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.d != 2:
            raise UnsupportedDimensionError("explicit harmonic bases exist only for d = 2")
        object.__setattr__(self, "labels", _labels(self.L))

    def __len__(self):
        return (self.L + 1) ** 2

    @property
    def degrees(self) -> np.ndarray:
        return np.array([lab[0] for lab in self.labels])

    def index(self, ell: int, m: int, part: str = "c") -> int:
        if m == 0:
            return ell * ell
        return ell * ell + 2 * m - (1 if part == "c" else 0)


@lru_cache(maxsize=64)
def _labels(L):
    out = []
    for ell in range(L + 1):
        out.append((ell, 0, "c"))
        for m in range(1, ell + 1):
            out += [(ell, m, "c"), (ell, m, "s")]
    return tuple(out)


def normalized_legendre(L: int, t) -> np.ndarray:
    """Table p[ell, m, ...] of fully normalized associated Legendre functions.

    Normalized so that 2 pi * int_{-1}^{1} p[ell, m](t)^2 dt = 1, i.e.
    p[ell, m](cos theta) e^{i m phi} is a unit vector in L^2(S^2). No
    Condon–Shortley phase. Entries with m > ell are zero.
    """
    t = np.asarray(t, dtype=float)
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    p = np.zeros((L + 1, L + 1) + t.shape)
    pmm = np.full(t.shape, 1.0 / math.sqrt(4 * math.pi))
    for m in range(L + 1):
        if m > 0:
            pmm = math.sqrt((2 * m + 1) / (2 * m)) * s * pmm
        p[m, m] = pmm
        if m == L:
            break
        p[m + 1, m] = math.sqrt(2 * m + 3) * t * pmm
        a_prev = math.sqrt(2 * m + 3)
        for ell in range(m + 2, L + 1):
            a = math.sqrt((4 * ell * ell - 1) / (ell * ell - m * m))
            p[ell, m] = a * (t * p[ell - 1, m] - p[ell - 2, m] / a_prev)
            a_prev = a
    return p


def basis_eval_s2(L: int, u) -> np.ndarray:
    """Values of all (L+1)^2 basis functions; shape (pi_L,) or (m, pi_L)."""
    u_arr = np.asarray(u, dtype=float)
    if u_arr.shape[-1] != 3:
        raise UnsupportedDimensionError("basis_eval_s2 needs points on S^2")
    pts = as_points(u_arr)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    phi = np.arctan2(y, x)
    p = normalized_legendre(L, z)
    out = np.empty((pts.shape[0], (L + 1) ** 2))
    root2 = math.sqrt(2.0)
    for ell in range(L + 1):
        base = ell * ell
        out[:, base] = p[ell, 0]
        for m in range(1, ell + 1):
            out[:, base + 2 * m - 1] = root2 * p[ell, m] * np.cos(m * phi)
            out[:, base + 2 * m] = root2 * p[ell, m] * np.sin(m * phi)
    return out[0] if u_arr.ndim == 1 else out


def evaluation_matrix(basis, points) -> np.ndarray:
    """E[j, k] = Y_k(z_j)."""
    L = basis.L if isinstance(basis, HarmonicBasis) else int(basis)
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError("empty point list")
    return basis_eval_s2(L, np.atleast_2d(pts))


def synthesize(coeffs, points) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    L = int(round(math.sqrt(len(c)))) - 1
    if (L + 1) ** 2 != len(c):
        raise ValueError("coefficient vector length must be (L+1)^2")
    return evaluation_matrix(L, points) @ c


def fourier_project(f, L: int, rule) -> np.ndarray:
    """Coefficients sum_i w_i f(x_i) Y_k(x_i) over a surface rule."""
    vals = np.asarray(f(rule.nodes), dtype=float)
    return evaluation_matrix(L, rule.nodes).T @ (rule.weights * vals)


def dilate_coeffs(coeffs, r: float) -> np.ndarray:
    """Coefficients of omega -> Q(r omega) via the homogeneous extension: c_{ell m} r^ell."""
    if r <= 0:
        raise ValueError("r must be positive")
    c = np.asarray(coeffs, dtype=float)
    L = int(round(math.sqrt(len(c)))) - 1
    return c * r ** HarmonicBasis(L).degrees


def write_coefficients(path, coeffs) -> None:
    c = np.asarray(coeffs, dtype=float)
    L = int(round(math.sqrt(len(c)))) - 1
    if (L + 1) ** 2 != len(c):
        raise ValueError("coefficient vector length must be (L+1)^2")
    Path(path).write_text(f"# d=2 L={L}\n" + "\n".join(f"{x:.17g}" for x in c) + "\n")


def read_coefficients(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    hdr = dict(tok.split("=") for tok in lines[0][1:].split())
    L = int(hdr["L"])
    c = np.array([float(x) for x in lines[1:] if x.strip()])
    if len(c) != (L + 1) ** 2:
        raise ValueError(f"{path}: expected {(L + 1) ** 2} coefficients, found {len(c)}")
    return c


def _panel_integral(fn, breaks, k):
    gl = golub_welsch(k, (0.0, 0.0))
    a, b = breaks[:-1, None], breaks[1:, None]
    th = 0.5 * (b - a) * gl.nodes[None, :] + 0.5 * (b + a)
    return float(np.sum(0.5 * (b - a) * gl.weights[None, :] * fn(th)))


def zonal_abs_power_integral(d: int, L: int, p: float, rtol: float = 1e-9) -> float:
    """int_{S^d} |P_L^{(1+lam,lam)}(<u, N>)|^p dsigma(u).

    The integrand has kinks at the zeros of the polynomial, so the
    colatitude range is split at those zeros (Gauss–Jacobi nodes of the same
    index) and each panel gets a Gauss–Legendre rule; the panel order is
    doubled until the relative change falls below ``rtol``.
    """
    idx = kernel_index(d)
    zeros = golub_welsch(L, idx).nodes if L > 0 else np.array([])
    breaks = np.concatenate([[0.0], np.sort(np.arccos(zeros)), [math.pi]])

    def fn(th):
        return np.abs(jacobi_eval(idx, L, np.cos(th))) ** p * np.sin(th) ** (d - 1)

    k = 8
    prev = _panel_integral(fn, breaks, k)
    for _ in range(5):
        k *= 2
        cur = _panel_integral(fn, breaks, k)
        if abs(cur - prev) <= rtol * abs(cur):
            return surface_area(d - 1) * cur
        prev = cur
    raise PrecisionError(f"|P_L|^p integral not converged (d={d}, L={L}, p={p})")


def kernel_l1_norm(d: int, L: int) -> float:
    """||K_L(N, .)||_{L^1(S^d)}."""
    return kernel_constant(d, L) / surface_area(d) * zonal_abs_power_integral(d, L, 1.0)
