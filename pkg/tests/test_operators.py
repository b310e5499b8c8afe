import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given

from cliquehom.complex import CliqueComplex, WeightedGraph, enumerate_cliques
from cliquehom.gadgets import generalized_octahedron, qubit_complex
from cliquehom.operators import (OperatorError, boundary, coboundary, kernel_dim, laplacian,
                                 laplacian_table, low_spectrum, min_eigenvalue, restricted_down,
                                 restricted_up)
from cliquehom.oracle import betti_numbers, dense_boundary

from conftest import complexes


def K(edges, n=None, dmax=2, weights=None):
    n = n if n is not None else 1 + max(max(e) for e in edges)
    return CliqueComplex(WeightedGraph.build(weights or [1.0] * n, edges), dmax)


def smax(M) -> float:
    M = sp.csr_matrix(M)
    return float(abs(M).max()) if M.nnz else 0.0


SQUARE = [(0, 1), (1, 2), (2, 3), (0, 3)]


def hollow_square():
    X = K(SQUARE, dmax=1)
    X.orient((3, 0))
    return X


def test_triangle_boundary_column():
    X = K([(0, 1), (0, 2), (1, 2)])
    col = boundary(X, 2).dense()[:, 0]
    # edges in order (0,1), (0,2), (1,2)
    assert col.tolist() == [1.0, -1.0, 1.0]


def test_square_cycle_is_closed():
    X = hollow_square()
    c = np.ones(4)
    assert np.allclose(boundary(X, 1).dense() @ c, 0)


def test_glued_squares_boundary(glued_squares):
    T = glued_squares
    X = T.X
    top = np.zeros(X.count(2))
    for cs in T.cells:
        for c in cs:
            top[X.position(c)] = 1.0
    got = boundary(X, 2).dense() @ top
    expect = np.zeros(X.count(1))
    for s in T.layers[0]:
        expect[X.position(s)] += 1.0
    for s in T.layers[-1]:
        expect[X.position(s)] -= 1.0
    assert np.allclose(got, expect, atol=1e-12)


def test_coboundary_is_transpose():
    X = K([(0, 1), (0, 2), (1, 2), (2, 3)])
    assert np.array_equal(coboundary(X, 1).dense(), boundary(X, 2).dense().T)
    P = K([(0, 1), (1, 2)], dmax=1)
    col = coboundary(P, 0).dense()[:, 1]
    assert sorted(np.abs(col[col != 0]).tolist()) == [1.0, 1.0]


def test_entry_lookup_negates_on_flip():
    from cliquehom.complex import OrientedSimplex
    X = K([(0, 1), (0, 2), (1, 2)])
    B = boundary(X, 2)
    s, t = X.oriented((0, 1, 2)), X.oriented((0, 2))
    assert B.entry(t, s) == -1.0
    assert B.entry(OrientedSimplex((0, 2), -1), s) == 1.0


def test_octahedron_diagonal():
    O = generalized_octahedron(3)
    L = laplacian(O, 2).dense()
    assert np.allclose(np.diag(L), 3.0)


def test_shared_coface_pairs_vanish():
    X = K([(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
    L = laplacian(X, 1).dense()
    i, j = X.position((0, 1)), X.position((0, 2))
    assert L[i, j] == 0.0
    # (0,1) and (1,3) share vertex 1 but no triangle
    assert L[X.position((0, 1)), X.position((1, 3))] != 0.0


def test_qubit_complex_kernel():
    X, _ = qubit_complex(1)
    assert kernel_dim(laplacian(X, 1)) == 2


@pytest.mark.parametrize("seed", range(10))
def test_random_dense_boundary_matches_oracle(seed):
    from conftest import random_complex
    X = random_complex(seed)
    for d in range(1, X.dmax + 1):
        assert np.allclose(boundary(X, d).dense(), dense_boundary(X, d))


@given(complexes())
def test_boundary_squared_vanishes(X):
    for d in range(1, X.dmax):
        P = boundary(X, d).matrix @ boundary(X, d + 1).matrix
        assert smax(P) <= 1e-12


@given(complexes())
def test_laplacian_table_matches_composition(X):
    for d in range(X.dmax + 1):
        kinds = ["down", "full"] + (["up"] if d < X.dmax else [])
        for kind in kinds:
            if kind == "down" and d == 0:
                continue
            M = laplacian(X, d, kind, check=False).matrix
            T = laplacian_table(X, d, kind)
            assert smax(M - T) <= 1e-10


@given(complexes())
def test_laplacians_are_psd(X):
    for d in range(X.dmax + 1):
        L = laplacian(X, d).dense()
        if L.size:
            assert np.linalg.eigvalsh(L)[0] >= -1e-9


@given(complexes(max_vertices=10))
def test_kernel_dimension_equals_betti(X):
    b = betti_numbers(X)
    for d, bd in enumerate(b):
        assert kernel_dim(laplacian(X, d)) == bd


@given(complexes(max_vertices=10))
def test_local_decomposition(X):
    for d in range(1, X.dmax):
        up = sum((restricted_up(X, d, t).matrix for t in X.simplices(d + 1)),
                 sp.csr_matrix((X.count(d), X.count(d))))
        assert smax(up - laplacian(X, d, "up").matrix) <= 1e-12
        down = sum((restricted_down(X, d, t).matrix for t in X.simplices(d - 1)),
                   sp.csr_matrix((X.count(d), X.count(d))))
        assert smax(down - laplacian(X, d, "down").matrix) <= 1e-12


def _nonneg_kernel_on(M, idx):
    """Whether M restricted to idx has a kernel vector with all entries > 0."""
    from scipy.optimize import linprog
    A = M[np.ix_(idx, idx)]
    n = len(idx)
    res = linprog(np.zeros(n), A_eq=A, b_eq=np.zeros(n), bounds=[(1, None)] * n, method="highs")
    return res.status == 0


def test_same_sign_edges_have_no_nonnegative_local_state():
    X = K([(0, 1), (0, 2)], dmax=1)
    R = restricted_down(X, 1, X.oriented((0,))).dense()
    assert np.linalg.matrix_rank(R) == 1
    assert not _nonneg_kernel_on(R, [0, 1])


def test_cancelling_pair_has_nonnegative_local_state():
    X = K([(0, 1), (0, 2), (1, 2)])
    X.set_sign((1, 2), -1)
    R = restricted_up(X, 1, X.oriented((0, 1, 2))).dense()
    assert np.linalg.matrix_rank(R) == 1
    idx = [X.position((0, 1)), X.position((1, 2))]
    assert _nonneg_kernel_on(R, idx)


def test_min_eigenvalue_examples():
    assert abs(min_eigenvalue(laplacian(hollow_square(), 1))) <= 1e-10
    F = K(SQUARE + [(0, 2), (1, 3)], dmax=3)
    assert min_eigenvalue(laplacian(F, 1)) > 1e-3
    assert min_eigenvalue(sp.diags([3.0, 3.0, 3.0])) == pytest.approx(3.0)


def test_iterative_path_above_dense_limit():
    n = 2500
    M = sp.diags(np.arange(1.0, n + 1))
    assert np.allclose(low_spectrum(M, 3), [1.0, 2.0, 3.0])


def test_non_symmetric_rejected():
    with pytest.raises(OperatorError):
        low_spectrum(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_uniform_weight_scaling_is_quadratic():
    X = K([(0, 1), (0, 2), (1, 2), (2, 3)])
    Y = K([(0, 1), (0, 2), (1, 2), (2, 3)], weights=[2.0] * 4)
    assert np.allclose(laplacian(Y, 1).dense(), 4 * laplacian(X, 1).dense())
