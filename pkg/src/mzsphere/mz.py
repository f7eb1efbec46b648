"""Marcinkiewicz–Zygmund and interpolation analysis on S^2, plus zonal scaling studies.

p = 2 frame bounds are exact eigenvalues; every p != 2 quantity is a
Monte-Carlo estimate whose direction is stated in the docstring.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._errors import DomainError, PrecisionError
from .concentration import trace_closed_form
from .families import TriangularFamily, density_scan
from .harmonic import (
    dim_pi,
    evaluation_matrix,
    kernel_constant,
    kernel_l1_norm,
    zonal_abs_power_integral,
)
from .linalg import golub_welsch, min_norm_lstsq, sym_eigen
from .special_fn import ZonalProfile, funk_hecke_symbol, gamma_fn, generalized_binomial, jacobi_eval, kernel_index
from .sphere import sphere_rule_s2, surface_area


@dataclass(frozen=True)
class FrameBounds:
    L: int
    m_L: int
    A: float
    B: float

    @property
    def condition(self) -> float:
        return self.B / self.A if self.A > 0 else math.inf

    def as_dict(self) -> dict:
        return {**asdict(self), "condition": self.condition}


@dataclass
class InterpolationResult:
    coefficients: np.ndarray
    residual: float
    interpolant_norm_sq: float
    data_norm_sq: float
    condition: float
    rank: int
    values_norm: float

    @property
    def stability_quotient(self) -> float:
        return self.interpolant_norm_sq / self.data_norm_sq if self.data_norm_sq > 0 else math.nan

    @property
    def interpolating(self) -> bool:
        return self.residual <= 1e-8 * max(self.values_norm, 1e-300)


def frame_bounds_l2(points, L: int) -> FrameBounds:
    """Best A, B with A ||Q||^2 <= pi_L^{-1} sum_j |Q(z_j)|^2 <= B ||Q||^2 on Pi_L."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        raise ValueError("frame bounds need at least one point")
    E = evaluation_matrix(L, pts)
    n = E.shape[1]
    M = E.T @ E / n
    w = sym_eigen((M + M.T) / 2).eigenvalues
    B = float(w[-1])
    A = float(w[0])
    if len(pts) < n or A <= 1e-13 * B:
        A = 0.0
    return FrameBounds(L, len(pts), A, B)


@dataclass
class SweepResult:
    rows: list
    verdict: str
    notices: list = field(default_factory=list)


def mz_sweep(family: TriangularFamily, Ls, max_condition: float = 100.0,
             min_lower: float = 1e-4 / (4 * math.pi), jobs: int = 1) -> SweepResult:
    """Frame bounds across generations with a finite-scale p = 2 verdict."""
    notices = []
    todo = []
    for L in Ls:
        if L not in family:
            notices.append(f"generation L={L} missing; skipped")
            continue
        if len(family[L]) < dim_pi(2, L):
            notices.append(f"L={L}: m_L={len(family[L])} < pi_L={dim_pi(2, L)}")
        todo.append(L)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        rows = list(pool.map(lambda L: frame_bounds_l2(family[L], L), todo))
    ok = bool(rows) and all(r.A >= min_lower and r.condition <= max_condition for r in rows)
    verdict = "MZ-consistent at p=2" if ok else "not MZ-consistent at p=2"
    return SweepResult(rows, verdict, notices)


def _trial_rngs(seed: int, trials: int):
    # per-trial streams: SeedSequence(seed).spawn(trials)[i] feeds trial i
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def _surface_values(coeffs, L, exactness):
    rule = sphere_rule_s2(exactness)
    vals = np.empty(len(rule.weights))
    for s in range(0, len(vals), 8192):
        vals[s:s + 8192] = evaluation_matrix(L, rule.nodes[s:s + 8192]) @ coeffs
    return rule, vals


def _sup_norm(coeffs, L, n_polish=8):
    # dense grid, then local polish of the best grid points in (theta, phi)
    from scipy.optimize import minimize

    rule, v = _surface_values(coeffs, L, 8 * L + 8)
    best = float(np.abs(v).max())
    nodes = rule.nodes[np.argsort(-np.abs(v))[:n_polish]]

    def neg(x):
        st = math.sin(x[0])
        u = np.array([[st * math.cos(x[1]), st * math.sin(x[1]), math.cos(x[0])]])
        return -abs(float((evaluation_matrix(L, u) @ coeffs)[0]))

    for z in nodes:
        x0 = [math.acos(np.clip(z[2], -1, 1)), math.atan2(z[1], z[0])]
        res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
        best = max(best, -float(res.fun))
    return best


def continuous_norm_p(coeffs, L: int, p: float, rtol: float = 1e-4, max_doublings: int = 6) -> float:
    """int |Q|^p over S^2 by product quadrature, or sup |Q| for p = inf.

    Even integer p is exact at exactness p * L. Otherwise the rule is
    doubled until two successive relative changes are below ``rtol``;
    |Q|^p has kinks on the nodal set, so convergence is only algebraic and
    not monotone, and a single small change can be a false stop. The sup is a dense
    grid maximum polished by local search, so it can only err low.
    """
    if math.isinf(p):
        return _sup_norm(coeffs, L)
    if float(p).is_integer() and int(p) % 2 == 0:
        rule, v = _surface_values(coeffs, L, int(p) * L)
        return float(np.dot(rule.weights, v ** int(p)))
    ex = int(math.ceil(p)) * L + 8
    rule, v = _surface_values(coeffs, L, ex)
    prev = float(np.dot(rule.weights, np.abs(v) ** p))
    calm = 0
    for _ in range(max_doublings):
        ex *= 2
        rule, v = _surface_values(coeffs, L, ex)
        cur = float(np.dot(rule.weights, np.abs(v) ** p))
        calm = calm + 1 if abs(cur - prev) <= rtol * cur else 0
        if calm == 2:
            return cur
        prev = cur
    raise PrecisionError(f"|Q|^{p} quadrature not converged (L={L})")


def cp_monte_carlo(points, L: int, p: float, trials: int, seed: int, rtol: float = 1e-4):
    """Extreme observed discrete/continuous p-norm ratios over random Q in Pi_L.

    Returns ``(lower_A_est, upper_B_est)``: the smallest and largest ratios
    seen. The true best constants satisfy A_p <= lower_A_est and
    B_p >= upper_B_est. For p < inf the ratio is
    (pi_L^{-1} sum_j |Q(z_j)|^p) / int |Q|^p; for p = inf it is
    max_j |Q(z_j)| / sup |Q|.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pts = np.asarray(points, dtype=float)
    E = evaluation_matrix(L, pts)
    n = E.shape[1]
    ratios = []
    for rng in _trial_rngs(seed, trials):
        c = rng.standard_normal(n)
        q = E @ c
        if math.isinf(p):
            ratios.append(np.abs(q).max() / continuous_norm_p(c, L, p))
        else:
            ratios.append((np.abs(q) ** p).sum() / n / continuous_norm_p(c, L, p, rtol=rtol))
    return float(min(ratios)), float(max(ratios))


def interpolate_min_norm(points, L: int, values) -> InterpolationResult:
    """Minimum-norm Q in Pi_L with Q(z_j) = values_j (least squares if inconsistent)."""
    pts = np.asarray(points, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(v) != len(pts):
        raise ValueError("need one value per point")
    E = evaluation_matrix(L, pts)
    sol = min_norm_lstsq(E, v)
    n = E.shape[1]
    return InterpolationResult(
        coefficients=sol.c,
        residual=sol.residual,
        interpolant_norm_sq=float(np.dot(sol.c, sol.c)),
        data_norm_sq=float(np.dot(v, v)) / n,
        condition=sol.condition,
        rank=sol.rank,
        values_norm=float(np.linalg.norm(v)),
    )


def critical_density(d: int) -> float:
    """2 Gamma((d+1)/2) / (d! d sqrt(pi) Gamma(d/2))."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return 2 * gamma_fn((d + 1) / 2) / (math.factorial(d) * d * math.sqrt(math.pi) * gamma_fn(d / 2))


def critical_density_via_trace(d: int, L: int, alpha: float) -> float:
    """Expected count of a cap of radius alpha/(L+1) per alpha^d, from the trace identity."""
    if alpha / (L + 1) > 0.2:
        raise DomainError("small-cap regime requires alpha/(L+1) <= 0.2")
    return trace_closed_form(d, L, alpha) / alpha ** d


@dataclass
class SymbolTable:
    symbols: np.ndarray
    minimum: float


def mollifier_symbol(d: int, L: int, delta: float) -> SymbolTable:
    """Funk–Hecke symbols, ell = 0..L, of (L/delta)^d times the indicator of B(N, delta/(2(L+1)))."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    radius = delta / (2 * (L + 1))
    if radius >= math.pi:
        raise DomainError("mollifier radius must be < pi")
    height = (L / delta) ** d
    h = ZonalProfile(lambda t: np.full_like(t, height), d, lower=math.cos(radius))
    s = np.array([funk_hecke_symbol(h, ell, d) for ell in range(L + 1)])
    return SymbolTable(s, float(s.min()))


def _zonal_abs_l1(fn, d, breaks_t, k0=8, rtol=1e-10):
    breaks = np.unique(np.concatenate([[0.0, math.pi], np.arccos(np.clip(breaks_t, -1, 1))]))
    a, b = breaks[:-1, None], breaks[1:, None]

    def run(k):
        gl = golub_welsch(k, (0.0, 0.0))
        th = 0.5 * (b - a) * gl.nodes + 0.5 * (b + a)
        return float(np.sum(0.5 * (b - a) * gl.weights * np.abs(fn(np.cos(th))) * np.sin(th) ** (d - 1)))

    k = k0
    prev = run(k)
    for _ in range(5):
        k *= 2
        cur = run(k)
        if abs(cur - prev) <= rtol * abs(cur):
            return surface_area(d - 1) * cur
        prev = cur
    raise PrecisionError("zonal L^1 integral not converged")


@dataclass
class DelayedMeans:
    L: int
    d: int
    symbols: np.ndarray  # ell = 0..3L+2
    l1_norm: float
    unnormalized_symbol: float


def delayed_means_profile(d: int, L: int) -> ZonalProfile:
    """Zonal profile t -> K_{2L}(t) P_L(t) / P_L(1); identity on Pi_L, range in Pi_{3L}."""
    idx = kernel_index(d)
    p_at_1 = generalized_binomial(L + (d - 2) / 2 + 1, L)
    scale = kernel_constant(d, 2 * L) / (surface_area(d) * p_at_1)
    return ZonalProfile(lambda t: scale * jacobi_eval(idx, L, t) * jacobi_eval(idx, 2 * L, t), d, degree=3 * L)


def delayed_means_check(d: int, L: int) -> DelayedMeans:
    """Symbols m_ell (ell <= 3L+2) and the L^1(S^d) norm of the delayed-means profile.

    ``unnormalized_symbol`` is the constant symbol on Pi_L produced
    by the unnormalized product C(2L+lam+1, 2L)/C(L+lam+1, L) P_L P_{2L}.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    lam = (d - 2) / 2
    g = delayed_means_profile(d, L)
    rule_n = (3 * L + 3 * L + 2) // 2 + 2
    from .sphere import zonal_rule

    rule = zonal_rule(d, rule_n)
    symbols = np.array([funk_hecke_symbol(g, ell, d, rule=rule) for ell in range(3 * L + 3)])
    idx = kernel_index(d)
    breaks = np.concatenate([golub_welsch(L, idx).nodes, golub_welsch(2 * L, idx).nodes])
    l1 = _zonal_abs_l1(g, d, breaks)
    raw_c = generalized_binomial(2 * L + lam + 1, 2 * L) / generalized_binomial(L + lam + 1, L)
    scale = kernel_constant(d, 2 * L) / (surface_area(d) * generalized_binomial(L + lam + 1, L))
    return DelayedMeans(L, d, symbols, l1, raw_c / scale)


@dataclass
class ScalingTable:
    slope: float
    expected_slope: float
    Ls: list
    values: list


def _fit_slope(Ls, vals) -> float:
    return float(np.polyfit(np.log(Ls), np.log(vals), 1)[0])


def jacobi_lp_scaling(d: int, p: float, Ls) -> ScalingTable:
    """Slope of log int_{S^d} |P_L^{(1+lam,lam)}(<u,v>)|^p dsigma(u) against log L.

    Expected: d(p/2 - 1) above the critical exponent 2d/(d+1), -p/2 below.
    """
    crit = 2 * d / (d + 1)
    if abs(p - crit) < 1e-12:
        raise DomainError(f"p = {crit} is the logarithmic regime; not fitted")
    Ls = sorted(int(L) for L in Ls)
    if Ls[-1] < 8 * Ls[0]:
        raise ValueError("Ls must span a factor >= 8")
    vals = [zonal_abs_power_integral(d, L, p) for L in Ls]
    expected = d * (p / 2 - 1) if p > crit else -p / 2
    return ScalingTable(_fit_slope(Ls, vals), expected, Ls, vals)


def projection_l1_norm(d: int, Ls) -> ScalingTable:
    """Slope of log ||K_L(N, .)||_1 against log L; expected (d - 1)/2."""
    Ls = sorted(int(L) for L in Ls)
    if Ls[-1] < 8 * Ls[0]:
        raise ValueError("Ls must span a factor >= 8")
    vals = [kernel_l1_norm(d, L) for L in Ls]
    return ScalingTable(_fit_slope(Ls, vals), (d - 1) / 2, Ls, vals)


def complete_interp_diagnostic(family: TriangularFamily, Ls, alpha: float | None = None) -> dict:
    """Evidence for complete interpolation at each generation; never a theorem claim."""
    per_L, offending = [], []
    for L in Ls:
        pts = family[L]
        n = dim_pi(2, L)
        fb = frame_bounds_l2(pts, L)
        E = evaluation_matrix(L, pts)
        sv = np.linalg.svd(E, compute_uv=False)
        cond = float(sv[0] / sv[-1]) if sv[-1] > 0 and len(pts) == n else math.inf
        a = alpha if alpha is not None else max(2.0, (L + 1) / 4)
        dens = density_scan(TriangularFamily(2, {L: pts}), [a], [L])
        row = {
            "L": L, "m_L": len(pts), "pi_L": n, "square": len(pts) == n,
            "frame_bounds": fb.as_dict(), "interpolation_condition": cond,
            "density_alpha": a, "D_minus_est": dens.D_minus_est, "D_plus_est": dens.D_plus_est,
        }
        per_L.append(row)
        if len(pts) != n or fb.A <= 0:
            offending.append(L)
    if offending:
        verdict = f"not complete: m_L != pi_L or rank deficient at L={offending}"
    else:
        verdict = "complete at every tested generation (finite-scale evidence)"
    return {"per_L": per_L, "verdict": verdict, "critical_density": critical_density(2)}
