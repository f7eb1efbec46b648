import math

import numpy as np
import pytest

from mzsphere._errors import DomainError, PrecisionError
from mzsphere.acceptance import TETRAHEDRON
from mzsphere.families import TriangularFamily, family_from, gen_fibonacci, gen_random
from mzsphere.harmonic import dim_pi, evaluation_matrix, synthesize
from mzsphere.mz import (
    complete_interp_diagnostic,
    continuous_norm_p,
    cp_monte_carlo,
    critical_density,
    critical_density_via_trace,
    delayed_means_check,
    delayed_means_profile,
    frame_bounds_l2,
    interpolate_min_norm,
    jacobi_lp_scaling,
    mollifier_symbol,
    mz_sweep,
    projection_l1_norm,
)
from mzsphere.special_fn import funk_hecke_symbol
from mzsphere.sphere import as_points, sphere_rule_s2

FOUR_PI = 4 * math.pi


def test_tetrahedron_tight_frame():
    fb = frame_bounds_l2(TETRAHEDRON, 1)
    assert fb.A == pytest.approx(1 / FOUR_PI, abs=1e-12)
    assert fb.B == pytest.approx(1 / FOUR_PI, abs=1e-12)
    assert fb.condition == pytest.approx(1.0)


def test_too_few_points_gives_zero_lower_bound():
    fb = frame_bounds_l2(gen_random(5, 20, seed=1), 5)
    assert fb.A == 0 and fb.condition == math.inf and fb.B > 0
    with pytest.raises(ValueError):
        frame_bounds_l2(np.zeros((0, 3)), 2)


def test_duplicating_points_doubles_bounds():
    pts = gen_fibonacci(6, 1.5)
    a = frame_bounds_l2(pts, 6)
    b = frame_bounds_l2(np.vstack([pts, pts]), 6)
    assert b.A == pytest.approx(2 * a.A, rel=1e-10)
    assert b.B == pytest.approx(2 * a.B, rel=1e-10)


def test_frame_bounds_sandwich_quadratic_form():
    L = 8
    pts = gen_fibonacci(L, 1.5)
    fb = frame_bounds_l2(pts, L)
    E = evaluation_matrix(L, pts)
    n = dim_pi(2, L)
    rng = np.random.default_rng(2)
    for _ in range(100):
        c = rng.standard_normal(n)
        q = np.sum((E @ c) ** 2) / n
        nc = np.dot(c, c)
        assert fb.A * nc * (1 - 1e-12) <= q <= fb.B * nc * (1 + 1e-12)


def test_sweep_verdicts():
    good = mz_sweep(family_from("fibonacci", [4, 8, 16], 1.5), [4, 8, 16])
    assert good.verdict == "MZ-consistent at p=2"
    assert all(r.condition < 3 for r in good.rows)
    bad = mz_sweep(family_from("fibonacci", [4, 8], 0.8), [4, 8])
    assert bad.verdict == "not MZ-consistent at p=2"
    assert all(r.A == 0 for r in bad.rows) and len(bad.notices) == 2
    gap = mz_sweep(family_from("fibonacci", [4], 1.5), [4, 5], jobs=2)
    assert any("L=5" in s for s in gap.notices) and len(gap.rows) == 1


def test_sweep_jobs_agree():
    fam = family_from("random", [3, 6, 9], 2.0, seed=3)
    a = mz_sweep(fam, [3, 6, 9], jobs=1).rows
    b = mz_sweep(fam, [3, 6, 9], jobs=3).rows
    assert a == b


def test_continuous_norms():
    L = 5
    rng = np.random.default_rng(4)
    c = rng.standard_normal(dim_pi(2, L))
    assert continuous_norm_p(c, L, 2) == pytest.approx(np.dot(c, c), rel=1e-12)
    # |Q|^4 at exactness 4L against a much finer rule
    r = sphere_rule_s2(60)
    assert continuous_norm_p(c, L, 4) == pytest.approx(r.integrate(lambda x: synthesize(c, x) ** 4), rel=1e-10)
    p1 = continuous_norm_p(c, L, 1)
    fine = sphere_rule_s2(1200).integrate(lambda x: np.abs(synthesize(c, x)))
    assert p1 == pytest.approx(fine, rel=1e-4)
    sup = continuous_norm_p(c, L, math.inf)
    grid = np.abs(synthesize(c, sphere_rule_s2(200).nodes)).max()
    assert grid <= sup * (1 + 1e-12) and sup <= grid * 1.001
    with pytest.raises(PrecisionError):
        continuous_norm_p(c, L, 1.0, rtol=1e-14, max_doublings=1)


def test_cp_monte_carlo_p2_inside_frame_bounds():
    L = 6
    pts = gen_fibonacci(L, 2.0)
    fb = frame_bounds_l2(pts, L)
    lo, hi = cp_monte_carlo(pts, L, 2, trials=30, seed=5)
    assert fb.A * (1 - 1e-9) <= lo <= hi <= fb.B * (1 + 1e-9)


def test_cp_monte_carlo_sup_and_determinism():
    L = 6
    pts = gen_fibonacci(L, 4.0)
    lo, hi = cp_monte_carlo(pts, L, math.inf, trials=5, seed=6)
    assert 0.8 <= lo <= hi <= 1 + 1e-9
    assert cp_monte_carlo(pts, L, 1.0, trials=3, seed=7) == cp_monte_carlo(pts, L, 1.0, trials=3, seed=7)
    with pytest.raises(ValueError):
        cp_monte_carlo(pts, L, 2, trials=0, seed=1)


def test_interpolation_tetrahedron():
    rng = np.random.default_rng(8)
    v = rng.standard_normal(4)
    res = interpolate_min_norm(TETRAHEDRON, 1, v)
    assert res.interpolating and res.rank == 4
    assert np.allclose(synthesize(res.coefficients, TETRAHEDRON), v, atol=1e-12)
    # tight frame with A = B = 1/(4 pi), so the quotient is 4 pi
    assert res.stability_quotient == pytest.approx(FOUR_PI, rel=1e-12)


def test_interpolation_constant_data_unique_solution():
    for pts, L in [(TETRAHEDRON, 1), (gen_fibonacci(6, 1.5), 6)]:
        res = interpolate_min_norm(pts, L, np.ones(len(pts)))
        want = np.zeros(dim_pi(2, L))
        want[0] = math.sqrt(FOUR_PI)
        assert np.allclose(res.coefficients, want, atol=1e-10)


def test_interpolation_underdetermined_minimal():
    L = 6
    pts = gen_random(L, 20, seed=9)
    v = np.random.default_rng(10).standard_normal(20)
    res = interpolate_min_norm(pts, L, v)
    assert res.interpolating
    E = evaluation_matrix(L, pts)
    assert np.allclose(res.coefficients, np.linalg.pinv(E) @ v, atol=1e-9)
    # one point at L = 1: minimal-norm interpolant of the constant 1 is not constant
    one = interpolate_min_norm(TETRAHEDRON[:1], 1, [1.0])
    assert one.interpolating and np.count_nonzero(np.abs(one.coefficients[1:]) > 1e-12) > 0


def test_interpolation_overdetermined_least_squares():
    L = 3
    pts = gen_fibonacci(L, 3.0)
    v = np.random.default_rng(11).standard_normal(len(pts))
    res = interpolate_min_norm(pts, L, v)
    assert not res.interpolating
    E = evaluation_matrix(L, pts)
    assert np.allclose(res.coefficients, np.linalg.lstsq(E, v, rcond=None)[0], atol=1e-10)
    with pytest.raises(ValueError):
        interpolate_min_norm(pts, L, v[:-1])


def test_critical_density():
    assert critical_density(2) == pytest.approx(0.25, rel=1e-14)
    assert critical_density(1) == pytest.approx(2 / math.pi, rel=1e-14)
    for d in (1, 2, 3):
        v = critical_density_via_trace(d, 400, 10.0)
        assert v == pytest.approx(critical_density(d), rel=0.02)
    with pytest.raises(DomainError):
        critical_density_via_trace(2, 10, 5.0)
    with pytest.raises(ValueError):
        critical_density(0)


def test_mollifier_symbol():
    L, delta = 200, 1.0
    tab = mollifier_symbol(2, L, delta)
    radius = delta / (2 * (L + 1))
    assert tab.symbols[0] == pytest.approx((L / delta) ** 2 * 2 * math.pi * (1 - math.cos(radius)), rel=1e-10)
    assert tab.symbols[0] == pytest.approx(math.pi / 4, rel=0.02)
    mins = []
    for d in (2, 3):
        for L in (16, 32, 64):
            t = mollifier_symbol(d, L, 1.0)
            assert t.minimum > 0 and t.minimum == t.symbols.min()
            mins.append(t.minimum)
    assert max(mins[:3]) / min(mins[:3]) < 2 and max(mins[3:]) / min(mins[3:]) < 2
    with pytest.raises(DomainError):
        mollifier_symbol(2, 4, 0.0)


@pytest.mark.parametrize("d", [2, 3])
def test_delayed_means_symbols(d):
    L = 6
    dm = delayed_means_check(d, L)
    assert len(dm.symbols) == 3 * L + 3
    assert np.allclose(dm.symbols[: L + 1], 1.0, atol=1e-11)
    assert np.allclose(dm.symbols[3 * L + 1:], 0.0, atol=1e-11)
    assert dm.l1_norm >= 1.0


def test_delayed_means_unnormalized_constant():
    dm = delayed_means_check(2, 5)
    assert dm.unnormalized_symbol == pytest.approx(FOUR_PI, rel=1e-10)


def test_delayed_means_l1_bounded():
    vals = [delayed_means_check(2, L).l1_norm for L in (4, 8, 16, 32)]
    assert max(vals) < 2.0 and np.all(np.diff(vals) > -1e-9)


def test_delayed_means_acts_by_degree():
    # convolving with the zonal profile multiplies each degree-ell harmonic by the same symbol
    L = 3
    g = delayed_means_profile(2, L)
    r = sphere_rule_s2(4 * L + 4)
    E = evaluation_matrix(3 * L, r.nodes)
    u = as_points(np.random.default_rng(12).standard_normal((5, 3)))
    Gu = g(np.clip(u @ r.nodes.T, -1, 1)) * r.weights
    conv = Gu @ E
    Eu = evaluation_matrix(3 * L, u)
    dm = delayed_means_check(2, L)
    for ell in (1, 4, 7):
        start = ell * ell
        for k in (start, start + 2 * ell):
            want = dm.symbols[ell] * Eu[:, k]
            assert np.allclose(conv[:, k], want, atol=1e-9)
    assert funk_hecke_symbol(g, 2, 2) == pytest.approx(1.0, rel=1e-10)


def test_jacobi_lp_scaling():
    hi = jacobi_lp_scaling(2, 4.0, [16, 32, 64, 128])
    assert hi.expected_slope == 2.0 and abs(hi.slope - 2.0) <= 0.15
    lo = jacobi_lp_scaling(2, 1.0, [16, 32, 64, 128])
    assert lo.expected_slope == -0.5 and abs(lo.slope + 0.5) <= 0.15
    two = jacobi_lp_scaling(2, 2.0, [16, 32, 64, 128])
    assert abs(two.slope) <= 0.15
    with pytest.raises(DomainError):
        jacobi_lp_scaling(2, 4 / 3, [16, 128])
    with pytest.raises(ValueError):
        jacobi_lp_scaling(2, 4.0, [16, 32])


def test_projection_l1():
    t = projection_l1_norm(2, [16, 32, 64, 128])
    assert t.expected_slope == 0.5 and abs(t.slope - 0.5) <= 0.1
    one = projection_l1_norm(1, [16, 32, 64, 128])
    assert one.expected_slope == 0.0 and len(one.values) == 4 and np.isfinite(one.slope)


def test_complete_interp_diagnostic():
    tet = TriangularFamily(2, {1: TETRAHEDRON})
    rep = complete_interp_diagnostic(tet, [1])
    assert rep["verdict"].startswith("complete")
    assert rep["per_L"][0]["square"] and rep["critical_density"] == pytest.approx(0.25)
    fib = family_from("fibonacci", [4, 8], 1.0)
    rep = complete_interp_diagnostic(fib, [4, 8])
    assert all(r["m_L"] == r["pi_L"] for r in rep["per_L"])
    assert all(np.isfinite(r["interpolation_condition"]) for r in rep["per_L"])
    over = complete_interp_diagnostic(family_from("fibonacci", [4, 8], 1.5), [4, 8])
    assert over["verdict"].startswith("not complete") and "[4, 8]" in over["verdict"]
