import pytest
from hypothesis import given

from cliquehom.complex import (ChainVector, CliqueComplex, DegenerateSimplexError, OrientedSimplex,
                               TooLargeError, WeightedGraph, canonicalize, cofaces,
                               enumerate_cliques, faces, oriented, simplex_weight)
from cliquehom.gadgets import generalized_octahedron, qubit_graph

from conftest import complexes


def graph(edges, n=None, weights=None):
    n = n if n is not None else 1 + max(max(e) for e in edges)
    return WeightedGraph.build(weights or [1.0] * n, edges)


def test_triangle_counts():
    X = enumerate_cliques(graph([(0, 1), (0, 2), (1, 2)]), 2)
    assert [X.count(d) for d in range(3)] == [3, 3, 1]


def test_square_counts():
    X = enumerate_cliques(graph([(0, 1), (1, 2), (2, 3), (3, 0)]), 2)
    assert [X.count(d) for d in range(3)] == [4, 4, 0]


def test_single_qubit_graph_counts():
    X = CliqueComplex(qubit_graph(1).graph, 2)
    assert [X.count(d) for d in range(3)] == [8, 9, 0]


def test_enumeration_is_lexicographic():
    X = enumerate_cliques(graph([(0, 1), (0, 2), (1, 2), (2, 3)]), 2)
    assert X.simplices_vertices(1) == sorted(X.simplices_vertices(1))


def test_clique_cap():
    K = graph([(u, v) for u in range(8) for v in range(u + 1, 8)])
    with pytest.raises(TooLargeError):
        CliqueComplex(K, 7, cap=10)


def test_graph_validation():
    with pytest.raises(ValueError):
        WeightedGraph.build([1.0, 0.0], [(0, 1)])
    with pytest.raises(ValueError):
        WeightedGraph.build([1.0, 1.0], [(0, 0)])
    with pytest.raises(ValueError):
        WeightedGraph.build([1.0, 1.0], [(0, 2)])


@pytest.mark.parametrize("ordered,expect", [
    ([2, 1], ((1, 2), -1)),
    ([1, 2, 3], ((1, 2, 3), 1)),
    ([3, 1, 2], ((1, 2, 3), 1)),
])
def test_canonicalize(ordered, expect):
    s, parity = canonicalize(ordered)
    assert (s.vertices, parity) == expect


def test_canonicalize_rejects_repeats():
    with pytest.raises(DegenerateSimplexError):
        canonicalize([1, 2, 1])


@given(complexes(max_vertices=8))
def test_canonicalize_idempotent(X):
    for d in range(X.dmax + 1):
        for vs in X.simplices_vertices(d):
            s, _ = canonicalize(vs[::-1])
            assert canonicalize(s.vertices)[1] == 1


def test_faces_of_triangle():
    got = faces(OrientedSimplex((0, 1, 2)))
    assert [(f.vertices, s) for f, s in got] == [((1, 2), 1), ((0, 2), -1), ((0, 1), 1)]


def test_faces_of_flipped_edge():
    got = faces(OrientedSimplex((0, 1), -1))
    assert [(f.vertices, s) for f, s in got] == [((1,), -1), ((0,), 1)]


def test_faces_in_glued_squares(glued_squares):
    # vertex ids 0..3 carry the labels 1..4, so [1,3] is (0, 2)
    got = faces(OrientedSimplex((0, 2)), glued_squares.X)
    assert [(f.vertices, s) for f, s in got] == [((2,), 1), ((0,), -1)]


def test_cofaces_examples():
    X = enumerate_cliques(graph([(0, 1), (0, 2), (1, 2)]), 2)
    co = cofaces(X.oriented((1, 2)), X)
    assert [t.vertices for t, _ in co] == [(0, 1, 2)] and X.degree((1, 2)) == 1
    Y = enumerate_cliques(graph([(0, 1), (1, 2), (2, 3), (3, 0)]), 2)
    assert cofaces(Y.oriented((0, 1)), Y) == [] and Y.degree((0, 1)) == 0
    O = generalized_octahedron(3)
    O2 = CliqueComplex(O.graph, 2)
    assert all(len(cofaces(O2.oriented(e), O2)) == 2 for e in O2.simplices_vertices(1))


def test_simplex_weight():
    G = WeightedGraph.build([1.0, 0.1, 0.1, 1.0], [(0, 1), (1, 2), (0, 2), (2, 3)])
    assert simplex_weight((0, 1), G) == pytest.approx(0.1)
    assert simplex_weight((0, 1, 2), G) == pytest.approx(0.01)
    assert simplex_weight((0, 3), WeightedGraph.build([1.0] * 4, [(0, 3)])) == 1.0


@given(complexes(max_vertices=10))
def test_combinatorial_boundary_squared_vanishes(X):
    for d in range(2, X.dmax + 1):
        for sigma in X.simplices(d):
            acc = {}
            for f, s in faces(sigma, X):
                for g, t in faces(f, X):
                    acc[g.vertices] = acc.get(g.vertices, 0) + s * t
            assert all(v == 0 for v in acc.values())


@given(complexes(max_vertices=10))
def test_faces_and_cofaces_agree(X):
    for d in range(1, X.dmax):
        for sigma in X.simplices(d):
            for tau, s in cofaces(sigma, X):
                back = dict((f.vertices, t) for f, t in faces(tau, X))
                assert back[sigma.vertices] == s


@given(complexes(max_vertices=10))
def test_clique_closure(X):
    for d in range(1, X.dmax + 1):
        for vs in X.simplices_vertices(d):
            for i in range(len(vs)):
                assert vs[:i] + vs[i + 1:] in X


def test_chain_vector_canonicalizes_orientation():
    X = enumerate_cliques(graph([(0, 1)]), 1)
    c = ChainVector(1)
    c.add(oriented([1, 0]), 2.0, X)
    assert c.get((0, 1)) == -2.0
    assert c.get(oriented([1, 0]), X) == 2.0
    X.set_sign((0, 1), -1)
    d = ChainVector(1)
    d.add(oriented([1, 0]), 2.0, X)
    assert d.get((0, 1)) == 2.0
