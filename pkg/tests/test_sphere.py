import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from mzsphere._errors import DomainError
from mzsphere.harmonic import dim_pi, evaluation_matrix, kernel_profile
from mzsphere.sphere import (
    Cap,
    as_points,
    cap_area,
    cap_rule_s2,
    geodesic_distance,
    north_pole,
    read_points,
    reflection_to,
    sphere_point,
    sphere_rule_s2,
    surface_area,
    write_points,
    zonal_rule,
)


def test_sphere_point_normalizes():
    p = sphere_point([3.0, 0.0, 4.0])
    assert abs(np.linalg.norm(p) - 1) <= 1e-12
    with pytest.raises(ValueError):
        as_points([0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        as_points(np.ones((3, 4)), d=2)


def test_geodesic_examples():
    N = north_pole(2)
    assert geodesic_distance(N, N) == 0.0
    assert geodesic_distance(N, -N) == pytest.approx(math.pi)
    assert geodesic_distance([1, 0, 0], [0, 1, 0]) == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        geodesic_distance([1, 0, 0], [1, 0, 0, 0])


def test_geodesic_metric_axioms():
    rng = np.random.default_rng(0)
    u, v, w = as_points(rng.standard_normal((3, 200, 4)).reshape(600, 4)).reshape(3, 200, 4)
    duv, dvu = geodesic_distance(u, v), geodesic_distance(v, u)
    assert np.array_equal(duv, dvu)
    assert np.all(duv <= geodesic_distance(u, w) + geodesic_distance(w, v) + 1e-12)


@pytest.mark.parametrize("d, want", [(1, 2 * math.pi), (2, 4 * math.pi), (3, 2 * math.pi ** 2)])
def test_surface_area(d, want):
    assert surface_area(d) == pytest.approx(want, rel=1e-14)


def test_cap_area():
    for d in (1, 2, 3, 4):
        assert cap_area(d, math.pi) == pytest.approx(surface_area(d), rel=1e-12)
    assert cap_area(2, math.pi / 3) == pytest.approx(math.pi, rel=1e-13)
    th = 1e-3
    assert cap_area(2, th) / (surface_area(1) * th ** 2 / 2) == pytest.approx(1.0, rel=1e-5)
    grid = np.linspace(0, math.pi, 60)
    for d in (2, 3):
        vals = [cap_area(d, t) for t in grid]
        assert np.all(np.diff(vals) > 0)
    with pytest.raises(DomainError):
        cap_area(2, 4.0)


def test_cap_type():
    with pytest.raises(DomainError):
        Cap(north_pole(2), 0.0)
    with pytest.raises(DomainError):
        Cap(north_pole(2), math.pi)
    c = Cap([0, 0, 2.0], 0.5)
    assert c.d == 2 and np.allclose(c.center, [0, 0, 1])


def test_zonal_rule():
    r = zonal_rule(2, 7)
    assert r.exactness_degree == 13 and r.weights.sum() == pytest.approx(2.0)
    assert zonal_rule(3, 4).weights.sum() == pytest.approx(math.pi / 2, abs=1e-12)
    for d in (2, 3, 4):
        assert surface_area(d - 1) * zonal_rule(d, 5).weights.sum() == pytest.approx(surface_area(d), rel=1e-12)


def test_sphere_rule_s2():
    for Lx in (0, 5, 20):
        r = sphere_rule_s2(Lx)
        assert r.weights.sum() == pytest.approx(4 * math.pi, rel=1e-12)
    L = 12
    r = sphere_rule_s2(L)
    ints = r.weights @ evaluation_matrix(L, r.nodes)
    assert abs(ints[0] - math.sqrt(4 * math.pi)) <= 1e-12
    assert np.max(np.abs(ints[1:])) <= 1e-10


def test_sphere_rule_reproducing():
    rng = np.random.default_rng(1)
    for L in (3, 10, 20):
        r = sphere_rule_s2(2 * L)
        E = evaluation_matrix(L, r.nodes)
        u = as_points(rng.standard_normal(3))[0]
        K = kernel_profile(2, L, np.clip(r.nodes @ u, -1, 1))
        got = (r.weights * K) @ E
        assert np.allclose(got, evaluation_matrix(L, u), atol=1e-9)


def test_cap_rule():
    rng = np.random.default_rng(2)
    cap = Cap(as_points(rng.standard_normal(3))[0], 0.7)
    r = cap_rule_s2(cap, 10)
    assert r.weights.sum() == pytest.approx(cap_area(2, 0.7), rel=1e-10)
    assert np.all(r.nodes @ cap.center >= math.cos(0.7) - 1e-12)
    hemi = cap_rule_s2(Cap(north_pole(2), math.pi / 2), 4)
    assert hemi.integrate(lambda x: x[:, 2]) == pytest.approx(math.pi, rel=1e-12)
    full = cap_rule_s2(Cap(north_pole(2), math.pi - 1e-12), 12)
    E = evaluation_matrix(6, full.nodes)
    assert np.allclose(E.T @ (full.weights[:, None] * E), np.eye(dim_pi(2, 6)), atol=1e-9)


def test_cap_rule_rotation_invariance():
    R = Rotation.random(random_state=3).as_matrix()
    N = north_pole(2)
    prof = lambda x, c: np.exp(3 * (x @ c))  # noqa: E731  zonal about c
    a = cap_rule_s2(Cap(N, 0.9), 24).integrate(lambda x: prof(x, N))
    c = R @ N
    b = cap_rule_s2(Cap(c, 0.9), 24).integrate(lambda x: prof(x, c))
    assert a == pytest.approx(b, rel=1e-9)


def test_reflection_maps_pole():
    rng = np.random.default_rng(4)
    for _ in range(5):
        c = as_points(rng.standard_normal(4))[0]
        H = reflection_to(c)
        assert np.allclose(H @ north_pole(3), c)
        assert np.allclose(H.T @ H, np.eye(4))


def test_point_file_roundtrip(tmp_path):
    rng = np.random.default_rng(5)
    pts = as_points(rng.standard_normal((17, 3)))
    path = tmp_path / "Z_4.pts"
    write_points(path, pts, 4)
    got, hdr = read_points(path)
    assert hdr == {"d": 2, "L": 4, "m": 17}
    assert np.array_equal(got, pts)
    assert path.read_text().splitlines()[0] == "# d=2 L=4 m=17"


def test_point_file_header_mismatch(tmp_path):
    path = tmp_path / "bad.pts"
    path.write_text("# d=2 L=1 m=3\n0 0 1\n")
    with pytest.raises(ValueError):
        read_points(path)
    path.write_text("0 0 1\n")
    with pytest.raises(ValueError):
        read_points(path)
