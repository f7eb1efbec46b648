"""Triangular point families: generation, I/O, separation, densities, Carleson counts."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .harmonic import dim_pi
from .sphere import as_points, read_points, write_points

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
BRUTE_FORCE_LIMIT = 20_000
_CHUNK = 2048


@dataclass
class TriangularFamily:
    """One point set Z(L), an (m_L, d + 1) array, per degree L."""

    d: int
    generations: dict = field(default_factory=dict)

    def __post_init__(self):
        self.generations = {int(L): self._coerce(p) for L, p in self.generations.items()}

    def _coerce(self, pts):
        pts = np.asarray(pts, dtype=float)
        if pts.size == 0:
            return pts.reshape(0, self.d + 1)
        return as_points(pts, self.d)

    def __getitem__(self, L: int) -> np.ndarray:
        return self.generations[L]

    def __setitem__(self, L: int, pts):
        self.generations[int(L)] = self._coerce(pts)

    def __contains__(self, L) -> bool:
        return L in self.generations

    @property
    def degrees(self) -> list:
        return sorted(self.generations)

    def role_check(self, L: int) -> str:
        """'mz' if m_L >= pi_L, 'interpolation' if m_L <= pi_L, 'both' if equal."""
        m, n = len(self[L]), dim_pi(self.d, L)
        return "both" if m == n else ("mz" if m > n else "interpolation")

    def save(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for L, pts in self.generations.items():
            write_points(directory / f"Z_{L}.pts", pts, L, self.d)
        manifest = {"d": self.d, "generations": self.degrees}
        (directory / "family.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")

    @classmethod
    def load(cls, directory) -> "TriangularFamily":
        directory = Path(directory)
        manifest = json.loads((directory / "family.json").read_text())
        gens = {}
        for L in manifest["generations"]:
            pts, hdr = read_points(directory / f"Z_{L}.pts")
            if hdr["L"] != L or hdr["d"] != manifest["d"]:
                raise ValueError(f"Z_{L}.pts header disagrees with family.json")
            gens[L] = pts
        return cls(manifest["d"], gens)


def fibonacci_points(m: int) -> np.ndarray:
    """m points of the Fibonacci spiral on S^2; m = 1 gives the north pole."""
    if m < 1:
        return np.zeros((0, 3))
    if m == 1:
        return np.array([[0.0, 0.0, 1.0]])
    i = np.arange(m)
    z = 1.0 - (2 * i + 1) / m
    r = np.sqrt(1.0 - z * z)
    phi = GOLDEN_ANGLE * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def gen_fibonacci(L: int, c: float) -> np.ndarray:
    """round(c * pi_L) Fibonacci points on S^2."""
    if c * dim_pi(2, L) < 1:
        raise ValueError("c * pi_L must be >= 1")
    return fibonacci_points(int(round(c * dim_pi(2, L))))


def gen_random(L: int, m: int, seed: int, d: int = 2) -> np.ndarray:
    """m uniform points from normalized Gaussian vectors (L is recorded only by the caller)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    g = np.random.default_rng(seed).standard_normal((m, d + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def family_from(kind: str, Ls, c: float = 1.0, seed: int = 0, d: int = 2) -> TriangularFamily:
    gens = {}
    for L in Ls:
        if kind == "fibonacci":
            gens[L] = gen_fibonacci(L, c)
        elif kind == "random":
            m = int(round(c * dim_pi(d, L)))
            gens[L] = gen_random(L, m, seed + L, d)
        else:
            raise ValueError(f"unknown family kind {kind!r}")
    return TriangularFamily(d, gens)


def _min_pair_angle(pts: np.ndarray) -> float:
    m = len(pts)
    if m > BRUTE_FORCE_LIMIT:
        from scipy.spatial import cKDTree

        dist, _ = cKDTree(pts).query(pts, k=2)
        chord = float(dist[:, 1].min())
        return 2.0 * math.asin(min(1.0, chord / 2))
    best = 1.0 - 2.0
    for s in range(0, m, _CHUNK):
        G = pts[s:s + _CHUNK] @ pts.T
        rows = np.arange(G.shape[0])
        G[rows, rows + s] = -2.0
        best = max(best, float(G.max()))
    return math.acos(min(1.0, best))


def separation_constant(points, L: int) -> float:
    """(L + 1) * min pairwise geodesic distance; +inf for fewer than two points."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return math.inf
    return (L + 1) * _min_pair_angle(pts)


def family_separation(family: TriangularFamily) -> float:
    return min((separation_constant(family[L], L) for L in family.degrees), default=math.inf)


def extract_separated(points, L: int, delta: float) -> np.ndarray:
    """Greedy delta/(L+1)-separated subset that covers the input within delta/(L+1)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return pts
    cos_r = math.cos(delta / (L + 1))
    kept = np.empty_like(pts)
    k = 0
    for p in pts:
        if k == 0 or np.max(kept[:k] @ p) <= cos_r:
            kept[k] = p
            k += 1
    return kept[:k].copy()


def cap_counts(points, centers, radius: float) -> np.ndarray:
    """#(points in B(z, radius)) for each center z."""
    pts = np.asarray(points, dtype=float)
    cen = np.atleast_2d(np.asarray(centers, dtype=float))
    if len(pts) == 0:
        return np.zeros(len(cen), dtype=int)
    cos_r = math.cos(radius)
    out = np.empty(len(cen), dtype=int)
    for s in range(0, len(cen), _CHUNK):
        out[s:s + _CHUNK] = np.count_nonzero(cen[s:s + _CHUNK] @ pts.T >= cos_r - 1e-15, axis=1)
    return out


def _hull_covering_angle(pts: np.ndarray) -> float | None:
    """Exact covering radius from the convex hull; None when the hull is degenerate."""
    from scipy.spatial import ConvexHull, QhullError

    if len(pts) < pts.shape[1] + 1:
        return None
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return None
    # each facet plane n.x = -b leaves the cap around n empty; its vertices are nearest
    normals, offsets = hull.equations[:, :-1], hull.equations[:, -1]
    return float(np.max(np.arccos(np.clip(-offsets / np.linalg.norm(normals, axis=1), -1.0, 1.0))))


def mesh_norm(points, L: int, probe=None) -> float:
    """(L + 1) * max over the sphere of the distance to the family.

    Without ``probe`` the maximum is exact, read off the convex hull of the
    points (a Fibonacci probe is used when the hull is degenerate). With an
    explicit probe array the maximum is taken over the probe only, which
    underestimates it.
    """
    pts = np.asarray(points, dtype=float)
    if probe is None:
        ang = _hull_covering_angle(pts)
        if ang is not None:
            return (L + 1) * ang
        if pts.shape[1] != 3:
            raise ValueError("degenerate point set: pass an explicit probe")
        probe = fibonacci_points(20 * len(pts) + 2000)
    probe = np.asarray(probe, dtype=float)
    best = np.full(len(probe), -1.0)
    for s in range(0, len(probe), _CHUNK):
        best[s:s + _CHUNK] = np.max(probe[s:s + _CHUNK] @ pts.T, axis=1)
    return (L + 1) * math.acos(max(-1.0, min(1.0, float(best.min()))))


@dataclass
class DensityReport:
    d: int
    rows: list  # dicts with alpha, L, min_count, max_count, min_ratio, max_ratio
    D_minus_est: float
    D_plus_est: float


def density_scan(family: TriangularFamily, alphas, Ls, probe_factor: int = 4, probe=None) -> DensityReport:
    """Finite-(alpha, L) min/max cap counts normalized by alpha^d.

    Candidate centers are the family's own points plus a Fibonacci probe of
    ``probe_factor * m_L`` points; the extreme values are therefore
    estimates. The D^- / D^+ estimates are the ratios at the largest alpha
    and largest L of the grid, not limits. An explicit ``probe`` array
    replaces the Fibonacci probe for every generation.
    """
    if probe_factor < 4:
        warnings.warn("probe_factor < 4: min counts may be overestimated", stacklevel=2)
    d = family.d
    rows = []
    for L in Ls:
        pts = family[L]
        m = len(pts)
        centers = pts
        extra = probe
        if extra is None and d == 2:
            extra = fibonacci_points(max(probe_factor * m, 1))
        if extra is not None:
            extra = np.asarray(extra, dtype=float).reshape(-1, d + 1)
            centers = np.vstack([pts, extra]) if m else extra
        for a in alphas:
            r = a / (L + 1)
            if r >= math.pi:
                raise ValueError(f"alpha/(L+1) = {r} must be < pi")
            counts = cap_counts(pts, centers, r)
            lo, hi = int(counts.min()), int(counts.max())
            rows.append({"alpha": float(a), "L": int(L), "min_count": lo, "max_count": hi,
                         "min_ratio": lo / a ** d, "max_ratio": hi / a ** d})
    top = [r for r in rows if r["alpha"] == max(alphas) and r["L"] == max(Ls)][0]
    return DensityReport(d, rows, top["min_ratio"], top["max_ratio"])


def _perturbed_source(L: int, delta: float, s: int) -> int:
    return int(math.floor((1 + s * delta) * L + 1e-12))


def perturb_index(family: TriangularFamily, delta: float, sign: str = "+", Ls=None) -> TriangularFamily:
    """Family whose generation L is generation floor((1 +/- delta) L) of the source.

    Without ``Ls``, every L whose source generation is present is produced;
    an explicit ``Ls`` with a missing source raises ``ValueError``.
    """
    s = {"+": 1, "-": -1}[sign]
    if Ls is None:
        top = max(family.degrees, default=-1)
        bound = top if s > 0 else int(top / max(1 - delta, 1e-12)) + 1
        Ls = [L for L in range(bound + 1) if _perturbed_source(L, delta, s) in family]
    missing = [(L, _perturbed_source(L, delta, s)) for L in Ls if _perturbed_source(L, delta, s) not in family]
    if missing:
        gap = ", ".join(f"L={L} needs Z({src})" for L, src in missing)
        raise ValueError(f"source generations missing: {gap}")
    return TriangularFamily(family.d, {L: family[_perturbed_source(L, delta, s)] for L in Ls})


def carleson_max_count(points, L: int, radius_scale: float = 1.0) -> int:
    """max over family points z of #(Z(L) in B(z, radius_scale / L)).

    Centers are restricted to the family's own points, so this can undercount
    the true supremum by a bounded factor.
    """
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return 0
    return int(cap_counts(pts, pts, radius_scale / max(L, 1)).max())
