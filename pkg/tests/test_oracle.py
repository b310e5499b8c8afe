import numpy as np
import pytest
from hypothesis import given

from cliquehom.complex import ChainVector, CliqueComplex, TooLargeError, WeightedGraph
from cliquehom.gadgets import generalized_octahedron, qubit_complex
from cliquehom.operators import kernel_dim, laplacian
from cliquehom.oracle import (betti, betti_numbers, boundary_rank, dense_laplacian, harmonic_basis, is_boundary,
                              is_cycle, rational_rank, sat_kernel_bruteforce)
from cliquehom.sat import Projector, StoquasticSAT

from conftest import complexes, random_complex


def square(dmax=2):
    return CliqueComplex(WeightedGraph.build({v: 1.0 for v in range(4)},
                                             [(0, 1), (1, 2), (2, 3), (0, 3)]), dmax)


def test_hollow_square():
    assert betti_numbers(square(), 1) == [1, 1]


def test_octahedron_sphere():
    O = generalized_octahedron(3)
    X = CliqueComplex(O.graph, 3)
    b = betti_numbers(X, 2)
    assert b == [1, 0, 1]
    chi = sum((-1) ** d * X.count(d) for d in range(3))
    assert chi == 2


def test_qubit_complex_betti():
    X, _ = qubit_complex(2)
    assert betti_numbers(X, 3)[3] == 4


def test_rational_rank():
    assert rational_rank([{0: 1, 1: 1}, {0: 1, 1: 1}, {1: 3}]) == 2
    assert rational_rank([]) == 0


@given(complexes(max_vertices=10))
def test_euler_characteristic(X):
    b = betti_numbers(X, X.dmax - 1)
    top = X.dmax - 1
    # the alternating sums differ by the rank of the top boundary map
    chi_cells = sum((-1) ** d * X.count(d) for d in range(top + 1))
    chi_betti = sum((-1) ** d * b[d] for d in range(top + 1))
    assert chi_cells - chi_betti == (-1) ** top * boundary_rank(X, top + 1)


@given(complexes(max_vertices=10))
def test_oracle_matches_kernel_dimension(X):
    b = betti_numbers(X, X.dmax - 1)
    for d in range(X.dmax):
        assert kernel_dim(laplacian(X, d)) == b[d]
        assert harmonic_basis(X, d).shape[1] == b[d]


def test_harmonic_basis_is_orthonormal_kernel():
    X = random_complex(3, 9)
    for d in range(X.dmax):
        K = harmonic_basis(X, d)
        assert np.allclose(K.T @ K, np.eye(K.shape[1]), atol=1e-10)
        assert np.allclose(dense_laplacian(X, d) @ K, 0, atol=1e-8)


def test_betti_profile_harmonics():
    prof = betti(square(), 1)
    assert prof.betti == [1, 1]
    (h,) = prof.harmonics[1]
    assert is_cycle(h, square())


def test_cycle_and_boundary():
    X = square()
    c = ChainVector(1, {(0, 1): 1.0, (1, 2): 1.0, (2, 3): 1.0, (0, 3): -1.0})
    assert is_cycle(c, X) and not is_boundary(c, X)
    path = ChainVector(1, {(0, 1): 1.0})
    assert not is_cycle(path, X)
    filled = CliqueComplex(WeightedGraph.build({v: 1.0 for v in range(3)},
                                               [(0, 1), (1, 2), (0, 2)]), 2)
    tri = ChainVector(1, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): -1.0})
    assert is_cycle(tri, filled) and is_boundary(tri, filled)


def test_sat_kernel_examples():
    dim, v = sat_kernel_bruteforce(StoquasticSAT(1, (Projector.basis([0], "0"),)))
    assert dim == 1 and np.allclose(v, [0, 1])
    dim, v = sat_kernel_bruteforce(StoquasticSAT(1, (Projector.diff([0], "0", "1"),)))
    assert dim == 1 and np.allclose(v, [2 ** -0.5, 2 ** -0.5])
    dim, v = sat_kernel_bruteforce(StoquasticSAT(1, (Projector.basis([0], "0"),
                                                     Projector.diff([0], "0", "1"))))
    assert dim == 0 and v is None


def test_sat_kernel_vector_is_nonnegative():
    sat = StoquasticSAT(3, (Projector.diff([0, 1], "00", "11"), Projector.basis([2], "1")))
    dim, v = sat_kernel_bruteforce(sat)
    assert dim == 3
    assert v.min() >= 0 and np.allclose(sat.hamiltonian() @ v, 0)


def test_size_caps():
    with pytest.raises(TooLargeError):
        sat_kernel_bruteforce(StoquasticSAT(13, ()))
    import cliquehom.oracle as oracle
    X = random_complex(0, 12, 0.7)
    old = oracle.RANK_CAP
    oracle.RANK_CAP = 10
    try:
        with pytest.raises(TooLargeError):
            betti_numbers(X)
    finally:
        oracle.RANK_CAP = old
