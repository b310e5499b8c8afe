"""Weighted boundary, coboundary and Laplacian operators.

Every operator acts in the normalized basis |[sigma]> = w(sigma)^{-1}|sigma>,
in which the boundary entry between a simplex and one of its faces is the
incidence sign times the weight of the removed vertex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .complex import CliqueComplex, ComplexError, OrientedSimplex

DENSE_LIMIT = 2000
HARD_CAP = 200_000


class OperatorError(RuntimeError):
    pass


@dataclass(frozen=True)
class SparseOperator:
    matrix: sp.csr_matrix
    X: CliqueComplex
    col_dim: int
    row_dim: int

    @property
    def shape(self):
        return self.matrix.shape

    def entry(self, row: OrientedSimplex, col: OrientedSimplex) -> float:
        X = self.X
        v = self.matrix[X.position(row.vertices), X.position(col.vertices)]
        if row.dim > 0:
            v *= row.sign * X.sign(row.vertices)
        if col.dim > 0:
            v *= col.sign * X.sign(col.vertices)
        return float(v)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, x):
        return self.matrix @ x

    @property
    def T(self) -> "SparseOperator":
        return SparseOperator(self.matrix.T.tocsr(), self.X, self.row_dim, self.col_dim)

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        if self.shape[0] != self.shape[1]:
            return False
        diff = self.matrix - self.matrix.T
        return diff.nnz == 0 or float(abs(diff).max()) <= tol


def boundary(X: CliqueComplex, d: int) -> SparseOperator:
    """The weighted boundary map C_d -> C_{d-1}."""
    if d < 1 or d > X.dmax:
        raise ComplexError(f"boundary needs 1 <= d <= {X.dmax}, got {d}")
    w = X.graph.weights
    rows, cols, vals = [], [], []
    fsign = X.signs(d - 1)
    for j, (vs, s) in enumerate(zip(X.simplices_vertices(d), X.signs(d))):
        for i, v in enumerate(vs):
            r = X.position(vs[:i] + vs[i + 1:])
            rows.append(r)
            cols.append(j)
            vals.append(int(s) * int(fsign[r]) * (-1) ** i * w[v])
    M = sp.csr_matrix((vals, (rows, cols)), shape=(X.count(d - 1), X.count(d)))
    return SparseOperator(M, X, d, d - 1)


def coboundary(X: CliqueComplex, d: int) -> SparseOperator:
    """The map C_d -> C_{d+1}, adjoint of the boundary in the normalized basis."""
    return boundary(X, d + 1).T


def laplacian(X: CliqueComplex, d: int, kind: str = "full", check: bool = True) -> SparseOperator:
    """Up, down or full Laplacian, assembled by composition.

    With ``check`` the result is compared entrywise with the closed-form
    matrix elements and a mismatch raises ``OperatorError``.
    """
    if kind not in ("up", "down", "full"):
        raise ValueError(f"unknown Laplacian kind {kind!r}")
    if d < 0 or d > X.dmax:
        raise ComplexError(f"no simplices of dimension {d}")
    n = X.count(d)
    M = sp.csr_matrix((n, n))
    if kind in ("up", "full"):
        if d + 1 > X.dmax:
            if kind == "up":
                raise ComplexError(f"up-Laplacian needs simplices of dimension {d + 1}")
        else:
            B = boundary(X, d + 1).matrix
            M = M + B @ B.T
    if kind in ("down", "full") and d >= 1:
        B = boundary(X, d).matrix
        M = M + B.T @ B
    M = sp.csr_matrix(M)
    M.eliminate_zeros()
    if check:
        T = laplacian_table(X, d, kind)
        diff = M - T
        if diff.nnz and float(abs(diff).max()) > 1e-10:
            raise OperatorError("composed Laplacian disagrees with the matrix-element table")
    return SparseOperator(M, X, d, d)


def laplacian_table(X: CliqueComplex, d: int, kind: str = "full") -> sp.csr_matrix:
    """Laplacian from its local matrix elements, without composing boundaries.

    Diagonal: sum of squared weights of the vertices that extend sigma to a
    coface (up part) plus the squared weights of sigma's own vertices (down
    part).  Off-diagonal pairs share a face; for the full Laplacian they
    contribute only when they have no common coface.
    """
    w = X.graph.weights
    n = X.count(d)
    verts = X.simplices_vertices(d)
    signs = X.signs(d)
    has_up = d + 1 <= X.dmax
    up = kind in ("up", "full") and has_up
    down = kind in ("down", "full") and d >= 1
    diag = np.zeros(n)
    if up:
        co = X.coface_index(d)
        top = X.simplices_vertices(d + 1)
        for j, vs in enumerate(verts):
            for t in co[j]:
                (extra,) = set(top[t]) - set(vs)
                diag[j] += w[extra] ** 2
    if down:
        for j, vs in enumerate(verts):
            diag[j] += sum(w[v] ** 2 for v in vs)
    entries: dict[tuple[int, int], float] = {}
    if d == 0 and up:
        # vertices share the empty face and every edge is a common coface
        for u, v in X.graph.edges:
            ju, jv = X.position((u,)), X.position((v,))
            entries[(ju, jv)] = entries[(jv, ju)] = -w[u] * w[v]
    if d >= 1 and (up or down):
        # group d-simplices by shared (d-1)-faces
        star: dict[tuple[int, ...], list[tuple[int, int, int]]] = {}
        for j, vs in enumerate(verts):
            for i, v in enumerate(vs):
                star.setdefault(vs[:i] + vs[i + 1:], []).append((j, v, int(signs[j]) * (-1) ** i))
        vertex_set = X.graph.neighbors()
        for face, members in star.items():
            fs = X.sign(face)
            for a in range(len(members)):
                ja, va, sa = members[a]
                for b in range(a + 1, len(members)):
                    jb, vb, sb = members[b]
                    # incidence of each simplex on the shared face, relative to the face's orientation
                    prod = sa * fs * sb * fs * w[va] * w[vb]
                    share = vb in vertex_set[va] and has_up
                    if kind == "full":
                        val = 0.0 if share else prod
                    elif kind == "down":
                        val = prod
                    else:
                        val = -prod if share else 0.0
                    if val != 0.0:
                        entries[(ja, jb)] = val
                        entries[(jb, ja)] = val
    rows = list(range(n)) + [k[0] for k in entries]
    cols = list(range(n)) + [k[1] for k in entries]
    vals = list(diag) + list(entries.values())
    M = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    M.eliminate_zeros()
    return M


def restricted_down(X: CliqueComplex, d: int, tau: OrientedSimplex) -> SparseOperator:
    """Rank-one piece of the down-Laplacian coming from the (d-1)-face tau."""
    B = boundary(X, d).matrix
    row = B.getrow(X.position(tau.vertices))
    return SparseOperator(sp.csr_matrix(row.T @ row), X, d, d)


def restricted_up(X: CliqueComplex, d: int, tau: OrientedSimplex) -> SparseOperator:
    """Rank-one piece of the up-Laplacian coming from the (d+1)-coface tau."""
    B = boundary(X, d + 1).matrix.tocsc()
    col = B.getcol(X.position(tau.vertices))
    return SparseOperator(sp.csr_matrix(col @ col.T), X, d, d)


def _as_matrix(op):
    return op.matrix if isinstance(op, SparseOperator) else op


def _check_symmetric(M):
    if M.shape[0] != M.shape[1]:
        raise OperatorError("operator is not square")
    if M.shape[0] > HARD_CAP:
        raise OperatorError(f"dimension {M.shape[0]} exceeds the cap {HARD_CAP}")
    diff = M - M.T
    if sp.issparse(diff):
        bad = diff.nnz and float(abs(diff).max()) > 1e-10
    else:
        bad = float(np.abs(diff).max(initial=0.0)) > 1e-10
    if bad:
        raise OperatorError("operator is not symmetric")


def low_spectrum(op, k: int = 6, tol: float = 1e-10) -> np.ndarray:
    """The k smallest eigenvalues, ascending."""
    M = _as_matrix(op)
    _check_symmetric(M)
    n = M.shape[0]
    if n == 0:
        return np.zeros(0)
    k = min(k, n)
    if n <= DENSE_LIMIT or k >= n - 1:
        A = M.toarray() if sp.issparse(M) else np.asarray(M)
        return scipy.linalg.eigvalsh(A, subset_by_index=[0, k - 1])
    v0 = np.linspace(1.0, 2.0, n)
    vals = spla.eigsh(sp.csc_matrix(M), k=k, sigma=-1e-6, which="LM", v0=v0,
                      tol=tol, return_eigenvectors=False)
    return np.sort(vals)


def min_eigenvalue(op, tol: float = 1e-10) -> float:
    return float(low_spectrum(op, 1, tol)[0])


def zero_threshold(op) -> float:
    """Scale-aware cutoff below which an eigenvalue counts as zero."""
    M = _as_matrix(op)
    norm = float(abs(M).sum(axis=1).max()) if M.shape[0] else 0.0
    return 1e-8 * (1.0 + norm)


def kernel_dim(op) -> int:
    M = _as_matrix(op)
    _check_symmetric(M)
    A = M.toarray() if sp.issparse(M) else np.asarray(M)
    vals = np.linalg.eigvalsh(A)
    return int(np.sum(vals < zero_threshold(M)))


def kernel_basis(op) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of a dense-scale operator."""
    M = _as_matrix(op)
    _check_symmetric(M)
    A = M.toarray() if sp.issparse(M) else np.asarray(M)
    vals, vecs = np.linalg.eigh(A)
    return vecs[:, vals < zero_threshold(M)]
