"""The acceptance suite: one function per criterion, each returning a CheckResult.

``quick=True`` trims parameter grids; tolerances never change.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .concentration import plunge_count, spectrum, trace_closed_form, trace_deficit_slope, trace_square
from .families import density_scan, extract_separated, family_from, gen_fibonacci, gen_random
from .harmonic import dim_pi, eval_kernel, evaluation_matrix
from .mz import (
    critical_density,
    critical_density_via_trace,
    delayed_means_check,
    frame_bounds_l2,
    interpolate_min_norm,
    jacobi_lp_scaling,
    projection_l1_norm,
)
from .sphere import as_points, sphere_rule_s2, surface_area

TETRAHEDRON = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / math.sqrt(3)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _rand_sphere(rng, n, d):
    return as_points(rng.standard_normal((n, d + 1)), d)


def kernel_identity(quick=False):
    rng = np.random.default_rng(1)
    Ls = range(0, 51, 7 if quick else 1)
    worst = 0.0
    for d in (2, 3, 4):
        for L in Ls:
            u = _rand_sphere(rng, 20, d)
            got = surface_area(d) * eval_kernel(d, L, u, u)
            worst = max(worst, float(np.max(np.abs(got / dim_pi(d, L) - 1))))
    return worst <= 1e-9, f"max rel err {worst:.2e} (tol 1e-9)"


def reproducing_property(quick=False):
    rng = np.random.default_rng(2)
    worst = 0.0
    for L in (8, 16) if quick else (8, 16, 32):
        rule = sphere_rule_s2(2 * L)
        E = evaluation_matrix(L, rule.nodes)
        for _ in range(10):
            c = rng.standard_normal(dim_pi(2, L))
            q_nodes = E @ c
            u = _rand_sphere(rng, 1, 2)[0]
            K = eval_kernel(2, L, u, rule.nodes)
            got = float(np.dot(rule.weights, K * q_nodes))
            want = float((evaluation_matrix(L, u) @ c)[0])
            worst = max(worst, abs(got - want) / np.abs(q_nodes).max())
    return worst <= 1e-9, f"max err/||Q||_inf {worst:.2e} (tol 1e-9)"


def trace_loop(quick=False):
    worst, lo, hi = 0.0, math.inf, -math.inf
    for L in range(1, 41, 6 if quick else 1):
        for theta in (0.2, 0.5, 1.0):
            rep = spectrum(L, theta, mode="theta")
            exact = trace_closed_form(2, L, theta * (L + 1))
            worst = max(worst, abs(rep.trace - exact) / exact)
            lo, hi = min(lo, rep.eigenvalues[-1]), max(hi, rep.eigenvalues[0])
    ok = worst <= 1e-8 and lo >= -1e-10 and hi <= 1 + 1e-10
    return ok, f"max rel err {worst:.2e}; eigenvalues in [{lo:.3g}, {hi:.6g}]"


def deficit_slope(quick=False):
    tab = trace_deficit_slope(2, 60, [4, 6, 8, 12, 16])
    return 0.75 <= tab.slope <= 1.35, f"slope {tab.slope:.4f} (window [0.75, 1.35])"


def critical_density_check(quick=False):
    errs = [abs(critical_density(2) - 0.25), abs(critical_density(1) - 2 / math.pi),
            abs(critical_density(4) - 1 / 64)]
    seq = [critical_density_via_trace(2, L, 8) for L in (50, 100, 200, 400)]
    diffs = np.diff(seq)
    monotone = bool(np.all(diffs >= -1e-12) or np.all(diffs <= 1e-12))
    near = abs(seq[2] / 0.25 - 1)
    ok = max(errs) <= 1e-12 and near <= 0.05 and monotone
    return ok, f"constants err {max(errs):.1e}; L=200 off by {near:.2%}; monotone={monotone}"


def lp_scaling(quick=False):
    Ls = [16, 32, 64, 128]
    s4 = jacobi_lp_scaling(2, 4, Ls).slope
    s1 = jacobi_lp_scaling(2, 1, Ls).slope
    ok = abs(s4 - 2) <= 0.2 and abs(s1 + 0.5) <= 0.1
    return ok, f"p=4 slope {s4:.4f} (2 +/- 0.2); p=1 slope {s1:.4f} (-0.5 +/- 0.1)"


def projection_growth(quick=False):
    s = projection_l1_norm(2, [16, 32, 64, 128]).slope
    return abs(s - 0.5) <= 0.15, f"slope {s:.4f} (0.5 +/- 0.15)"


def multiplier(quick=False):
    worst_one = worst_zero = 0.0
    norms = []
    for L in (8, 16, 32):
        dm = delayed_means_check(2, L)
        worst_one = max(worst_one, float(np.max(np.abs(dm.symbols[: L + 1] - 1))))
        worst_zero = max(worst_zero, float(np.max(np.abs(dm.symbols[3 * L + 1:]))))
        norms.append(dm.l1_norm)
    spread = (max(norms) - min(norms)) / min(norms)
    ok = worst_one <= 1e-8 and worst_zero <= 1e-8 and spread < 0.25
    return ok, f"|m-1| {worst_one:.1e}, |m| beyond 3L {worst_zero:.1e}, L1 spread {spread:.1%}"


def frame_exactness(quick=False):
    fb = frame_bounds_l2(TETRAHEDRON, 1)
    tet_err = max(abs(fb.A - 1 / (4 * math.pi)), abs(fb.B - 1 / (4 * math.pi)))
    rng = np.random.default_rng(9)
    cases = [("fibonacci", 1.5), ("fibonacci", 0.8), ("random", 1.05)]
    violations = 0
    for kind, c in cases:
        fam = family_from(kind, [8, 16] if quick else [8, 16, 32], c, seed=3)
        for L in fam.degrees:
            fb_L = frame_bounds_l2(fam[L], L)
            E = evaluation_matrix(L, fam[L])
            n = E.shape[1]
            C = rng.standard_normal((100, n))
            q = np.sum((C @ E.T) ** 2, axis=1) / n
            cc = np.sum(C * C, axis=1)
            violations += int(np.sum(q < fb_L.A * cc - 1e-10) + np.sum(q > fb_L.B * cc + 1e-10))
    ok = tet_err <= 1e-10 and violations == 0
    return ok, f"tetrahedron err {tet_err:.1e}; quadratic-form violations {violations}"


def interpolation(quick=False):
    # constants: unique-solution configurations (square nonsingular or full column rank)
    worst_const = 0.0
    for pts, L in ((TETRAHEDRON, 1), (gen_fibonacci(6, 1.5), 6), (gen_fibonacci(12, 1.2), 12)):
        res = interpolate_min_norm(pts, L, np.ones(len(pts)))
        e0 = np.zeros(dim_pi(2, L))
        e0[0] = math.sqrt(4 * math.pi)
        worst_const = max(worst_const, res.residual, float(np.max(np.abs(res.coefficients - e0))))
    rng = np.random.default_rng(10)
    worst_tet = max(interpolate_min_norm(TETRAHEDRON, 1, rng.standard_normal(4)).residual for _ in range(20))
    ok = worst_const <= 1e-12 and worst_tet <= 1e-10
    return ok, f"constant data err {worst_const:.1e}; tetrahedron residual {worst_tet:.1e}"


def plunge_sandwich(quick=False):
    checked = failed = 0
    for L in (8, 24, 40) if quick else (8, 16, 24, 32, 40):
        for alpha in (2, 4, 8, 12, 16):
            rep = spectrum(L, alpha)
            for g in (0.25, 0.5, 0.75):
                pc = plunge_count(rep, g)
                checked += 1
                failed += not (pc.lower_bound <= pc.count + 1e-9 and pc.count <= pc.upper_bound + 1e-9)
    return failed == 0, f"{checked - failed}/{checked} (L, alpha, gamma) cells satisfy the sandwich"


def density_echo(quick=False):
    worst = 0.0
    parts = []
    for c in (0.5, 1.0, 2.0):
        fam = family_from("fibonacci", [32], c)
        rep = density_scan(fam, [16], [32])
        dev = max(abs(rep.D_minus_est / (c / 4) - 1), abs(rep.D_plus_est / (c / 4) - 1))
        worst = max(worst, dev)
        parts.append(f"c={c}: [{rep.D_minus_est:.3f}, {rep.D_plus_est:.3f}]")
    return worst <= 0.15, "; ".join(parts) + f"; max deviation {worst:.1%} (tol 15%)"


def _brute_check_separated(pts, kept, r):
    G = np.clip(kept @ kept.T, -1, 1)
    np.fill_diagonal(G, -1)
    sep_ok = len(kept) < 2 or math.acos(G.max()) >= r - 1e-12
    cover = np.arccos(np.clip(pts @ kept.T, -1, 1)).min(axis=1)
    return sep_ok and float(cover.max()) <= r + 1e-12


def oracle_equivalences(quick=False):
    bad = 0
    for i in range(20):
        rng = np.random.default_rng(100 + i)
        L = int(rng.integers(4, 20))
        pts = gen_random(L, int(rng.integers(20, 400)), seed=200 + i)
        delta = float(rng.uniform(0.3, 3.0))
        kept = extract_separated(pts, L, delta)
        bad += not _brute_check_separated(pts, kept, delta / (L + 1))
    spec_v, _ = trace_square(2, 40, 8, method="spectral")
    quad_v, _ = trace_square(2, 40, 8, method="quadrature")
    rel = abs(spec_v - quad_v) / abs(spec_v)
    return bad == 0 and rel <= 1e-5, f"extract_separated failures {bad}/20; trace_square rel diff {rel:.1e}"


CRITERIA = [
    (1, "kernel identity", kernel_identity),
    (2, "reproducing property", reproducing_property),
    (3, "concentration trace closed loop", trace_loop),
    (4, "trace deficit scaling", deficit_slope),
    (5, "critical density", critical_density_check),
    (6, "Jacobi L^p scaling", lp_scaling),
    (7, "projection L^1 growth", projection_growth),
    (8, "delayed-means multiplier", multiplier),
    (9, "frame-bound exactness", frame_exactness),
    (10, "minimum-norm interpolation", interpolation),
    (11, "plunge sandwich", plunge_sandwich),
    (12, "density echo", density_echo),
    (13, "oracle equivalences", oracle_equivalences),
]


def run_criterion(number: int, quick: bool = False) -> CheckResult:
    num, name, fn = CRITERIA[number - 1]
    t0 = time.perf_counter()
    try:
        passed, detail = fn(quick)
    except Exception as exc:  # a crash is a failed criterion, reported with its cause
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(num, name, bool(passed), detail, time.perf_counter() - t0)


def run_all(quick: bool = False) -> list[CheckResult]:
    return [run_criterion(n, quick) for n, _, _ in CRITERIA]
