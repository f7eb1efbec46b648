"""Dense symmetric eigenproblems, minimum-norm least squares, Gauss rules.

Two eigen paths are available: ``method="ql"`` runs Householder
tridiagonalization followed by implicit-shift QL (pure numpy/Python), and
``method="lapack"`` defers to ``numpy.linalg.eigh``. The LAPACK path is the
default because Gram matrices here reach order ~10^3; the QL path is kept
as an independent implementation and is what :func:`golub_welsch` uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from ._errors import NumericalError
from .special_fn import JacobiIndex, log_gamma

MAX_SWEEPS = 30


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None


@dataclass(frozen=True)
class LstsqResult:
    c: np.ndarray
    residual: float
    rank: int
    condition: float


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights.

    ``nodes`` is a 1-D array of t in [-1, 1] for zonal rules and an
    (n, d + 1) array of unit vectors for surface rules.
    """

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    kind: str = "zonal"

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ValueError("node and weight counts differ")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")
        for arr in (self.nodes, self.weights):
            arr.setflags(write=False)

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def check_symmetric(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    scale = np.max(np.abs(A))
    if np.max(np.abs(A - A.T)) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    return A


def householder_tridiagonalize(A, want_q: bool = True):
    """Reduce symmetric A to tridiagonal form Q^T A Q = T.

    Returns ``(diag, offdiag, Q)`` with ``offdiag[0] == 0`` and
    ``offdiag[i]`` coupling rows i - 1 and i.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    Q = np.eye(n) if want_q else None
    for k in range(n - 2):
        x = A[k + 1:, k]
        alpha = -math.copysign(np.linalg.norm(x), x[0] if x[0] != 0 else 1.0)
        v = x.copy()
        v[0] -= alpha
        vn = np.dot(v, v)
        if vn == 0.0:
            continue
        v /= math.sqrt(vn)
        # A <- H A H with H = I - 2 v v^T acting on the trailing block
        sub = A[k + 1:, k:]
        sub -= 2.0 * np.outer(v, v @ sub)
        sub = A[k:, k + 1:]
        sub -= 2.0 * np.outer(sub @ v, v)
        if want_q:
            Qs = Q[:, k + 1:]
            Qs -= 2.0 * np.outer(Qs @ v, v)
    diag = np.diag(A).copy()
    off = np.zeros(n)
    off[1:] = np.diag(A, -1)
    return diag, off, Q


def tql_implicit(diag, offdiag, Z=None, max_sweeps: int = MAX_SWEEPS):
    """Implicit-shift QL on a symmetric tridiagonal matrix.

    ``offdiag[i]`` couples rows i - 1 and i (``offdiag[0]`` ignored). If Z is
    given, its columns are rotated along, so passing the Householder Q
    yields eigenvectors of the original matrix and passing a single row
    (shape (1, n)) yields only first components.
    """
    d = [float(x) for x in diag]
    n = len(d)
    e = [float(x) for x in offdiag[1:]] + [0.0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 2.2e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_sweeps:
                raise NumericalError(f"QL failed to converge for eigenvalue {l} after {max_sweeps} sweeps "
                                     f"(|e|={abs(e[l]):.3e})")
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if Z is not None:
                    zi = Z[:, i].copy()
                    Z[:, i] = c * zi - s * Z[:, i + 1]
                    Z[:, i + 1] = s * zi + c * Z[:, i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.array(d)


def sym_eigen(A, want_vectors: bool = False, method: str = "lapack") -> EigenDecomposition:
    """All eigenvalues (ascending) of a real symmetric matrix."""
    A = check_symmetric(A)
    if method == "lapack":
        if want_vectors:
            w, V = np.linalg.eigh(A)
            return EigenDecomposition(w, V)
        return EigenDecomposition(np.linalg.eigvalsh(A))
    if method != "ql":
        raise ValueError(f"unknown method {method!r}")
    diag, off, Q = householder_tridiagonalize(A, want_q=want_vectors)
    w = tql_implicit(diag, off, Q if want_vectors else None)
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], Q[:, order] if want_vectors else None)


def min_norm_lstsq(E, v, rcond: float = 1e-12) -> LstsqResult:
    """Minimum-norm least-squares solution of E c = v via the smaller Gram matrix.

    Gram eigenvalues below ``rcond * max`` are discarded; ``condition`` is
    the 2-norm condition number of E (inf when rank deficient).
    """
    E = np.asarray(E, dtype=float)
    v = np.asarray(v, dtype=float)
    m, n = E.shape
    G = E @ E.T if m <= n else E.T @ E
    eig = sym_eigen((G + G.T) / 2, want_vectors=True)
    w, V = eig.eigenvalues, eig.eigenvectors
    wmax = max(w[-1], 0.0)
    keep = w > rcond * wmax if wmax > 0 else np.zeros_like(w, dtype=bool)
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    if m <= n:
        c = E.T @ (V @ (inv * (V.T @ v)))
    else:
        c = V @ (inv * (V.T @ (E.T @ v)))
    rank = int(np.count_nonzero(keep))
    full = rank == min(m, n)
    condition = math.sqrt(wmax / w[0]) if full and w[0] > 0 else math.inf
    return LstsqResult(c, float(np.linalg.norm(E @ c - v)), rank, condition)


def _jacobi_matrix(n: int, a: float, b: float):
    k = np.arange(n, dtype=float)
    ab = a + b
    diag = np.empty(n)
    denom = (2 * k + ab) * (2 * k + ab + 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag[:] = (b * b - a * a) / denom
    if n and denom[0] == 0:
        diag[0] = (b - a) / (ab + 2)
    off = np.zeros(n)
    if n > 1:
        off[1] = math.sqrt(4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab)))
        kk = k[2:]
        c = 2 * kk + ab
        off[2:] = np.sqrt(4 * kk * (kk + a) * (kk + b) * (kk + ab) / (c * c * (c + 1) * (c - 1)))
    return diag, off


@lru_cache(maxsize=256)
def _golub_welsch_cached(n: int, a: float, b: float):
    diag, off = _jacobi_matrix(n, a, b)
    Z = np.zeros((1, n))
    Z[0, 0] = 1.0
    nodes = tql_implicit(diag, off, Z)
    mu0 = math.exp((a + b + 1) * math.log(2) + log_gamma(a + 1) + log_gamma(b + 1) - log_gamma(a + b + 2))
    weights = mu0 * Z[0] ** 2
    order = np.argsort(nodes)
    return QuadratureRule(nodes[order], weights[order], 2 * n - 1)


def golub_welsch(n: int, jacobi_idx=(0.0, 0.0)) -> QuadratureRule:
    """n-point Gauss rule for the weight (1 - t)^alpha (1 + t)^beta on [-1, 1]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b = JacobiIndex(*jacobi_idx).check()
    return _golub_welsch_cached(int(n), float(a), float(b))
