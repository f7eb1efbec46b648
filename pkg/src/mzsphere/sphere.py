"""Geometry and measure on S^d: distances, caps, areas, quadrature rules, point files.

Points are plain numpy arrays: a single point has shape (d + 1,), a point
set has shape (m, d + 1). Surface cubature is only provided for S^2;
general-d integrals in the package are zonal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._errors import DomainError
from .linalg import QuadratureRule, golub_welsch
from .special_fn import gamma_fn


def as_points(x, d: int | None = None) -> np.ndarray:
    """Coerce to an (m, d + 1) float array of unit vectors."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if d is not None and pts.shape[1] != d + 1:
        raise ValueError(f"expected points in R^{d + 1}, got dimension {pts.shape[1]}")
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero vector is not a sphere point")
    # leave rows that are already unit (to a few ulps) bit-for-bit unchanged
    norms[np.abs(norms - 1.0) <= 4 * np.finfo(float).eps] = 1.0
    return pts / norms[:, None]


def sphere_point(coords) -> np.ndarray:
    v = np.asarray(coords, dtype=float)
    return v / np.linalg.norm(v)


def north_pole(d: int) -> np.ndarray:
    n = np.zeros(d + 1)
    n[-1] = 1.0
    return n


@dataclass(frozen=True)
class Cap:
    center: np.ndarray
    theta: float

    def __post_init__(self):
        if not 0 < self.theta < math.pi:
            raise DomainError(f"cap radius must lie in (0, pi), got {self.theta}")
        object.__setattr__(self, "center", sphere_point(self.center))

    @property
    def d(self) -> int:
        return self.center.shape[0] - 1

    def contains(self, points) -> np.ndarray:
        return np.asarray(points) @ self.center >= math.cos(self.theta)


def geodesic_distance(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != v.shape[-1]:
        raise ValueError("points live on spheres of different dimension")
    dist = np.arccos(np.clip(np.sum(u * v, axis=-1), -1.0, 1.0))
    return float(dist) if np.ndim(dist) == 0 else dist


def surface_area(d: int) -> float:
    """sigma(S^d) = 2 pi^{(d+1)/2} / Gamma((d+1)/2); d = 0 gives the two-point count."""
    return 2 * math.pi ** ((d + 1) / 2) / gamma_fn((d + 1) / 2)


def theta_rule(theta_max: float, n: int):
    """Gauss–Legendre nodes and weights on [0, theta_max]."""
    gl = golub_welsch(n, (0.0, 0.0))
    half = 0.5 * theta_max
    return half * (gl.nodes + 1.0), half * gl.weights


def cap_area(d: int, theta: float) -> float:
    if not 0 <= theta <= math.pi:
        raise DomainError(f"theta must lie in [0, pi], got {theta}")
    if theta == 0:
        return 0.0
    if d == 1:
        return 2.0 * theta
    th, w = theta_rule(theta, 40 + 2 * d)
    return surface_area(d - 1) * float(np.dot(w, np.sin(th) ** (d - 1)))


def zonal_rule(d: int, n: int) -> QuadratureRule:
    """Gauss–Jacobi rule for the weight (1 - t^2)^{(d-2)/2}."""
    lam = (d - 2) / 2
    return golub_welsch(n, (lam, lam))


def _product_rule(t_nodes, t_weights, n_phi: int, exactness: int, rotation=None) -> QuadratureRule:
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    t = np.repeat(t_nodes, n_phi)
    s = np.sqrt(np.clip(1 - t * t, 0, None))
    ph = np.tile(phi, len(t_nodes))
    pts = np.column_stack([s * np.cos(ph), s * np.sin(ph), t])
    if rotation is not None:
        pts = pts @ rotation.T
    w = np.repeat(t_weights, n_phi) * (2 * math.pi / n_phi)
    return QuadratureRule(pts, w, exactness, kind="surface")


def sphere_rule_s2(L_exact: int) -> QuadratureRule:
    """Product rule on S^2 exact for spherical polynomials of degree <= L_exact."""
    n_t = math.ceil((L_exact + 1) / 2) + 1
    gl = golub_welsch(n_t, (0.0, 0.0))
    return _product_rule(gl.nodes, gl.weights, L_exact + 1, L_exact)


def reflection_to(center) -> np.ndarray:
    """Householder reflection mapping the north pole to ``center``."""
    c = sphere_point(center)
    N = north_pole(c.shape[0] - 1)
    w = N - c
    nw = np.dot(w, w)
    if nw < 1e-30:
        return np.eye(c.shape[0])
    return np.eye(c.shape[0]) - 2.0 * np.outer(w, w) / nw


def cap_rule_s2(cap: Cap, L_exact: int) -> QuadratureRule:
    """Rule on a cap of S^2, exact for polynomials of degree <= L_exact restricted to it."""
    if cap.d != 2:
        raise DomainError("cap_rule_s2 needs a cap on S^2")
    n_t = math.ceil((L_exact + 1) / 2) + 1
    gl = golub_welsch(n_t, (0.0, 0.0))
    lo = math.cos(cap.theta)
    t = lo + (1 - lo) * (gl.nodes + 1) / 2
    w = gl.weights * (1 - lo) / 2
    return _product_rule(t, w, L_exact + 1, L_exact, rotation=reflection_to(cap.center))


def write_points(path, points, L: int, d: int | None = None) -> None:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        pts = pts.reshape(0, (d if d is not None else 2) + 1)
    d = pts.shape[1] - 1 if d is None else d
    lines = [f"# d={d} L={L} m={pts.shape[0]}"]
    lines += [" ".join(f"{x:.17g}" for x in row) for row in pts]
    Path(path).write_text("\n".join(lines) + "\n")


def read_points(path):
    """Read a point file; returns ``(points, header)`` with header keys d, L, m."""
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing '# d=.. L=.. m=..' header")
    header = {}
    for tok in text[0][1:].split():
        key, _, val = tok.partition("=")
        header[key] = int(val)
    rows = [list(map(float, ln.split())) for ln in text[1:] if ln.strip()]
    pts = np.array(rows, dtype=float).reshape(len(rows), header["d"] + 1)
    if len(pts) != header["m"]:
        raise ValueError(f"{path}: header says m={header['m']} but file has {len(pts)} points")
    return pts, header
