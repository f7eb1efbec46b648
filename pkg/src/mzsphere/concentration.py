"""Cap concentration operator on Pi_L: Gram spectra, traces, plunge counts.

The spectrum of the operator Q -> P_L(chi_A Q) equals the spectrum of the
Gram matrix G[k, k'] = int_A Y_k Y_k' dsigma in any orthonormal basis. For a
polar cap on S^2 that Gram is block diagonal in the azimuthal order m,
with identical cos/sin blocks for m > 0.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._errors import DomainError, PrecisionError, UnsupportedDimensionError
from .harmonic import HarmonicBasis, dim_pi, kernel_profile, normalized_legendre
from .linalg import golub_welsch, sym_eigen
from .sphere import cap_area, surface_area, theta_rule


@dataclass
class SpectrumReport:
    d: int
    L: int
    alpha: float
    eigenvalues: np.ndarray  # descending
    trace: float
    trace_sq: float
    clamped: bool = False

    @property
    def theta(self) -> float:
        return self.alpha / (self.L + 1)


@dataclass(frozen=True)
class PlungeCount:
    count: int
    lower_bound: float
    upper_bound: float

    @property
    def sandwich_holds(self) -> bool:
        return self.lower_bound <= self.count <= self.upper_bound


def _check_theta(theta):
    if not 0 < theta < math.pi:
        raise DomainError(f"cap radius must lie in (0, pi), got {theta}")


def cap_gram_blocks(L: int, theta: float) -> dict[int, np.ndarray]:
    """Blocks G_m[ell, ell'] (ell, ell' = m..L) of the polar-cap Gram on S^2."""
    _check_theta(theta)
    n = L + 2
    gl = golub_welsch(n, (0.0, 0.0))
    lo = math.cos(theta)
    t = lo + (1 - lo) * (gl.nodes + 1) / 2
    w = gl.weights * (1 - lo) / 2
    p = normalized_legendre(L, t)
    blocks = {}
    for m in range(L + 1):
        P = p[m:, m, :]
        B = 2 * math.pi * (P * w) @ P.T
        blocks[m] = (B + B.T) / 2
    return blocks


def cap_gram_s2(L: int, theta: float) -> np.ndarray:
    """Full Gram matrix in canonical basis order (polar cap)."""
    blocks = cap_gram_blocks(L, theta)
    basis = HarmonicBasis(L)
    G = np.zeros((len(basis), len(basis)))
    for m, B in blocks.items():
        parts = ("c",) if m == 0 else ("c", "s")
        for part in parts:
            idx = [basis.index(ell, m, part) for ell in range(m, L + 1)]
            G[np.ix_(idx, idx)] = B
    return G


def spectrum(L: int, value: float, mode: str = "alpha", method: str = "lapack") -> SpectrumReport:
    """Eigenvalues of the polar-cap concentration operator on S^2.

    ``mode="alpha"`` reads ``value`` as alpha with cap radius alpha/(L+1);
    ``mode="theta"`` reads it as the radius itself.
    """
    if mode == "alpha":
        alpha, theta = float(value), float(value) / (L + 1)
    elif mode == "theta":
        theta, alpha = float(value), float(value) * (L + 1)
    else:
        raise ValueError("mode must be 'alpha' or 'theta'")
    eigs = []
    for m, B in cap_gram_blocks(L, theta).items():
        w = sym_eigen(B, method=method).eigenvalues
        eigs.append(w)
        if m > 0:
            eigs.append(w)
    lam = np.sort(np.concatenate(eigs))[::-1]
    clamped = bool(np.any(lam < 0) or np.any(lam > 1))
    if np.any(lam < -1e-10) or np.any(lam > 1 + 1e-10):
        raise DomainError(f"eigenvalue outside [0, 1] beyond tolerance: [{lam[-1]}, {lam[0]}]")
    lam = np.clip(lam, 0.0, 1.0)
    return SpectrumReport(2, L, alpha, lam, float(lam.sum()), float(np.dot(lam, lam)), clamped)


def trace_closed_form(d: int, L: int, alpha: float) -> float:
    """pi_L * sigma(A) / sigma(S^d) for a cap of radius alpha/(L+1)."""
    theta = alpha / (L + 1)
    if theta > math.pi:
        raise DomainError("alpha/(L+1) must not exceed pi")
    return dim_pi(d, L) * cap_area(d, theta) / surface_area(d)


def _trace_square_nested(d: int, L: int, theta: float, n: int) -> float:
    th, wt = theta_rule(theta, n)
    # relative azimuth: int_{S^{d-1}} f(<x, e>) = sigma(S^{d-2}) int f(s) (1 - s^2)^{(d-3)/2} ds
    lam = (d - 3) / 2
    psi_rule = golub_welsch(L + 2, (lam, lam))
    cu, su = np.cos(th), np.sin(th)
    t = (cu[:, None, None] * cu[None, :, None]
         + su[:, None, None] * su[None, :, None] * psi_rule.nodes[None, None, :])
    inner = kernel_profile(d, L, np.clip(t, -1, 1)) ** 2 @ psi_rule.weights
    wu = wt * su ** (d - 1)
    return float(surface_area(d - 1) * surface_area(d - 2) * wu @ inner @ wu)


def trace_square(d: int, L: int, alpha: float, method: str = "auto", rtol: float = 1e-6):
    """tr(K_A^2) for a cap of radius alpha/(L+1).

    Returns ``(value, method)``. ``"spectral"`` sums squared eigenvalues
    (d = 2 only); ``"quadrature"`` integrates |K_L(u, v)|^2 over A x A with
    nested Gauss rules in (theta_u, theta_v, relative azimuth), doubling the
    colatitude rule until the relative change is below ``rtol``.
    """
    theta = alpha / (L + 1)
    _check_theta(theta)
    if method == "auto":
        method = "spectral" if d == 2 else "quadrature"
    if method == "spectral":
        if d != 2:
            raise UnsupportedDimensionError("spectral trace_square needs d = 2")
        return spectrum(L, alpha).trace_sq, "spectral"
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    n = max(16, L // 2 + 8)
    prev = _trace_square_nested(d, L, theta, n)
    for _ in range(6):
        n *= 2
        cur = _trace_square_nested(d, L, theta, n)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur, "quadrature"
        prev = cur
    raise PrecisionError(f"nested quadrature for tr(K_A^2) not converged (d={d}, L={L}, alpha={alpha})")


def plunge_count(report: SpectrumReport, gamma: float) -> PlungeCount:
    """#{lambda > gamma} with the bounds tr - (tr - tr2)/(1 - gamma) <= count <= tr/gamma."""
    if not 0 < gamma < 1:
        raise DomainError("gamma must lie in (0, 1)")
    count = int(np.count_nonzero(report.eigenvalues > gamma))
    tr, tr2 = report.trace, report.trace_sq
    return PlungeCount(count, tr - (tr - tr2) / (1 - gamma), tr / gamma)


@dataclass
class DeficitTable:
    slope: float
    alphas: list
    deficits: list
    excluded: list = field(default_factory=list)


def trace_deficit_slope(d: int, L: int, alphas) -> DeficitTable:
    """Least-squares slope of log(tr K_A - tr K_A^2) against log alpha."""
    alphas = [float(a) for a in alphas]
    if len(alphas) < 4 or max(alphas) < 4 * min(alphas):
        raise ValueError("need at least 4 alphas spanning a factor >= 4")
    if max(alphas) / (L + 1) > math.pi / 2:
        raise DomainError("every alpha/(L+1) must be <= pi/2")
    deficits, excluded = [], []
    for a in alphas:
        if d == 2:
            rep = spectrum(L, a)
            deficit = rep.trace - rep.trace_sq
        else:
            deficit = trace_closed_form(d, L, a) - trace_square(d, L, a)[0]
        deficits.append(deficit)
        if not deficit > 0:
            excluded.append(a)
    keep = [(a, x) for a, x in zip(alphas, deficits) if x > 0]
    xs = np.log([a for a, _ in keep])
    ys = np.log([x for _, x in keep])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return DeficitTable(slope, alphas, deficits, excluded)


def landau_compare(points, L: int, alpha: float, gamma: float, delta: float, eps: float) -> dict:
    """Empirical eigenvalue-count comparison for a polar cap and a family.

    Counts N_L (radius (alpha+eps)/(L+1)) and n_L (radius (alpha-eps)/(L+1))
    of the family about the north pole and tests
    lambda_{N_L + 1} <= gamma and lambda_{n_L - 1} >= delta (1-based,
    descending). A family that is not eps-separated is flagged and the
    comparisons are skipped.
    """
    from .families import separation_constant

    if alpha <= eps:
        raise DomainError("alpha must exceed the separation constant eps")
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    sep = separation_constant(pts, L) if len(pts) >= 2 else math.inf
    rep = spectrum(L, alpha)
    lam = rep.eigenvalues
    z = pts[:, 2] if len(pts) else np.array([])
    N_L = int(np.count_nonzero(z >= math.cos(min(math.pi, (alpha + eps) / (L + 1)))))
    n_L = int(np.count_nonzero(z >= math.cos((alpha - eps) / (L + 1))))
    rec = {
        "L": L, "alpha": alpha, "gamma": gamma, "delta": delta, "eps": eps,
        "separation": sep, "separated": bool(sep >= eps),
        "N_L": N_L, "n_L": n_L, "lambda_1": float(lam[0]),
        "lambda_N_plus_1": None, "tail_below_gamma": None,
        "lambda_n_minus_1": None, "head_above_delta": None,
    }
    if not rec["separated"]:
        return rec
    if N_L + 1 <= len(lam):
        rec["lambda_N_plus_1"] = float(lam[N_L])
        rec["tail_below_gamma"] = bool(lam[N_L] <= gamma)
    else:
        rec["tail_below_gamma"] = True
    if n_L - 1 >= 1:
        rec["lambda_n_minus_1"] = float(lam[n_L - 2])
        rec["head_above_delta"] = bool(lam[n_L - 2] >= delta)
    return rec


def export_spectrum(report: SpectrumReport, csv_path, json_path=None) -> None:
    """Write ``k,lambda`` CSV plus a JSON header {d, L, alpha, trace, trace_sq}."""
    with open(csv_path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["k", "lambda"])
        for k, lam in enumerate(report.eigenvalues, start=1):
            wr.writerow([k, repr(float(lam))])
    if json_path is not None:
        head = {"d": report.d, "L": report.L, "alpha": report.alpha,
                "trace": report.trace, "trace_sq": report.trace_sq}
        Path(json_path).write_text(json.dumps(head, sort_keys=True, indent=2) + "\n")
