"""Brute-force ground truth: exact Betti numbers, harmonic bases, SAT kernels.

Ranks are taken over the rationals on the unweighted incidence matrices;
positive vertex weights are diagonal rescalings and cannot change a rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .complex import ChainVector, CliqueComplex, TooLargeError
from .sat import StoquasticSAT

RANK_CAP = 50_000
HARMONIC_CAP = 2000


def rational_rank(rows: list[dict[int, int]]) -> int:
    """Rank over Q of a sparse integer matrix given as a list of row dicts."""
    pivots: dict[int, dict[int, Fraction]] = {}
    for raw in rows:
        r = {c: Fraction(v) for c, v in raw.items() if v != 0}
        while r:
            lead = min(r)
            p = pivots.get(lead)
            if p is None:
                inv = 1 / r[lead]
                pivots[lead] = {c: v * inv for c, v in r.items()}
                break
            a = r[lead]
            for c, v in p.items():
                nv = r.get(c, 0) - a * v
                if nv:
                    r[c] = nv
                else:
                    r.pop(c, None)
    return len(pivots)


def incidence_rows(X: CliqueComplex, d: int) -> list[dict[int, int]]:
    """Unweighted, unoriented-sign incidence of d-simplices onto (d-1)-faces."""
    rows = []
    for vs in X.simplices_vertices(d):
        rows.append({X.position(vs[:i] + vs[i + 1:]): (-1) ** i for i in range(len(vs))})
    return rows


def boundary_rank(X: CliqueComplex, d: int) -> int:
    if d < 1 or d > X.dmax:
        return 0
    return rational_rank(incidence_rows(X, d))


@dataclass
class BettiProfile:
    betti: list[int]
    harmonics: list[list[ChainVector] | None]


def betti_numbers(X: CliqueComplex, max_dim: int | None = None) -> list[int]:
    """Exact Betti numbers for dimensions 0..max_dim (default dmax - 1).

    The top dimension of a truncated complex has no boundaries coming from
    above, so only dimensions below dmax describe the full clique complex.
    """
    if max_dim is None:
        max_dim = max(X.dmax - 1, 0)
    total = sum(X.count(d) for d in range(min(max_dim + 1, X.dmax) + 1))
    if total > RANK_CAP:
        raise TooLargeError(f"{total} simplices exceed the exact-rank cap {RANK_CAP}")
    ranks = {d: boundary_rank(X, d) for d in range(1, min(max_dim + 1, X.dmax) + 1)}
    out = []
    for d in range(max_dim + 1):
        out.append(X.count(d) - ranks.get(d, 0) - ranks.get(d + 1, 0))
    return out


def dense_boundary(X: CliqueComplex, d: int) -> np.ndarray:
    """Weighted boundary in the complex's orientation, built from scratch."""
    rows, cols = X.simplices_vertices(d - 1), X.simplices_vertices(d)
    pos = {s: i for i, s in enumerate(rows)}
    w = X.graph.weights
    B = np.zeros((len(rows), len(cols)))
    for j, vs in enumerate(cols):
        for i, v in enumerate(vs):
            f = vs[:i] + vs[i + 1:]
            B[pos[f], j] = (-1) ** i * w[v] * X.sign(vs) * X.sign(f)
    return B


def dense_laplacian(X: CliqueComplex, d: int) -> np.ndarray:
    n = X.count(d)
    L = np.zeros((n, n))
    if d >= 1:
        B = dense_boundary(X, d)
        L += B.T @ B
    if d + 1 <= X.dmax:
        B = dense_boundary(X, d + 1)
        L += B @ B.T
    return L


def harmonic_basis(X: CliqueComplex, d: int) -> np.ndarray:
    """Orthonormal columns spanning the numerical kernel of the d-Laplacian."""
    L = dense_laplacian(X, d)
    if L.shape[0] == 0:
        return np.zeros((0, 0))
    vals, vecs = np.linalg.eigh(L)
    cut = 1e-8 * (1.0 + float(np.abs(L).sum(axis=1).max()))
    return vecs[:, vals < cut]


def betti(X: CliqueComplex, max_dim: int | None = None, harmonics: bool = True) -> BettiProfile:
    b = betti_numbers(X, max_dim)
    hs: list[list[ChainVector] | None] = []
    for d in range(len(b)):
        if not harmonics or X.count(d) > HARMONIC_CAP:
            hs.append(None)
            continue
        K = harmonic_basis(X, d)
        hs.append([ChainVector.from_array(X, d, K[:, j]) for j in range(K.shape[1])])
    return BettiProfile(b, hs)


def is_cycle(c: ChainVector, X: CliqueComplex, tol: float = 1e-9) -> bool:
    if c.dim == 0:
        return True
    v = c.to_array(X)
    return bool(np.linalg.norm(dense_boundary(X, c.dim) @ v) <= tol * max(np.linalg.norm(v), 1.0))


def is_boundary(c: ChainVector, X: CliqueComplex, tol: float = 1e-9) -> bool:
    v = c.to_array(X)
    if c.dim + 1 > X.dmax:
        return bool(np.linalg.norm(v) <= tol)
    B = dense_boundary(X, c.dim + 1)
    if B.shape[1] == 0:
        return bool(np.linalg.norm(v) <= tol)
    sol, *_ = np.linalg.lstsq(B, v, rcond=None)
    res = float(np.linalg.norm(B @ sol - v))
    return bool(res <= tol * max(np.linalg.norm(v), 1.0))


def sat_kernel_bruteforce(sat: StoquasticSAT, tol: float = 1e-9):
    """Dimension of ker(sum of projectors) and a non-negative kernel vector if any."""
    if sat.n > 12:
        raise TooLargeError("brute-force SAT kernel is limited to 12 qubits")
    H = sat.hamiltonian()
    vals = np.linalg.eigvalsh(H)
    dim = int(np.sum(vals < tol))
    if dim == 0:
        return 0, None
    N = H.shape[0]
    A_eq = np.vstack([H, np.ones((1, N))])
    b_eq = np.concatenate([np.zeros(N), [1.0]])
    res = linprog(np.zeros(N), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * N, method="highs")
    if not res.success:
        return dim, None
    x = np.where(res.x > 1e-12, res.x, 0.0)
    return dim, x / np.linalg.norm(x)
