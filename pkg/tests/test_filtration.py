import numpy as np
import pytest
from scipy.optimize import linprog

from cliquehom.complex import CliqueComplex, WeightedGraph
from cliquehom.filtration import (Filtration, FiltrationError, StructuralError, build_phi_good,
                                  classify, essential_simplices, internal_simplices,
                                  relative_amplitude, validate_orientable, validate_uniform)
from cliquehom.fixtures import (annulus_merge_split, annulus_split_merge, broken_annulus,
                                filled_disc, hollow_square)
from cliquehom.gadgets import filling_gadget, generalized_octahedron, gluing_gadget, thicken
from cliquehom.operators import laplacian
from cliquehom.oracle import harmonic_basis

MERGE_SPLIT_TABLE = {(0, 1): 1, (1, 0): 1, (1, 2): 2, (2, 1): 1, (2, 3): 1, (3, 2): 2}


def flipped(X, vs):
    Y = CliqueComplex(X.graph, X.dmax, X.orientation_map())
    Y.set_sign(vs, -Y.sign(vs))
    return Y


def test_merge_split_annulus_is_uniform_orientable():
    f = annulus_merge_split()
    assert validate_orientable(f.X, f.F) == []
    rep = validate_uniform(f.X, f.F)
    assert rep.ok and rep.f_table == MERGE_SPLIT_TABLE


def test_radials_are_the_internal_simplices():
    f = annulus_merge_split()
    G = f.X.graph
    radials = {e for e in f.F.levels
               if sorted(G.labels[v][0] for v in e) == ["p", "q"] and G.labels[e[0]][1:] == G.labels[e[1]][1:]}
    assert internal_simplices(f.X, f.F) == {0: radials}
    ring_edges = {tuple(sorted(e)) for r in f.rings for e in zip(r, r[1:] + r[:1])}
    assert set().union(*essential_simplices(f.X, f.F).values()) == ring_edges


def test_non_adjacent_level_has_no_internal_simplices():
    G = WeightedGraph.build([1.0] * 6, [(0, 1), (2, 3), (4, 5)])
    X = CliqueComplex(G, 2)
    F = Filtration(1, {(0, 1): 0, (2, 3): 0, (4, 5): 0})
    assert internal_simplices(X, F) == {}


@pytest.mark.parametrize("p", [2, 3])
def test_thickening_internal_faces(p):
    T = thicken(generalized_octahedron(p))
    got = internal_simplices(T.X, T.F)
    ess = essential_simplices(T.X, T.F)
    for k in range(1, p + 1):
        assert got.get(k, set()) == set(T.internal[k - 1])
        assert ess[k] == set(T.layers[k])
    assert ess[0] == set(T.layers[0])


def test_single_flip_gives_localized_violations():
    f = annulus_merge_split()
    e = tuple(sorted(f.rings[1][:2]))
    Y = flipped(f.X, e)
    viol = validate_orientable(Y, f.F)
    down = [v for v in viol if v.kind == "down"]
    assert sorted(v.simplices[-1] for v in down) == [(e[0],), (e[1],)]
    assert all(e in v.simplices for v in viol)


def test_hollow_square_orientability():
    assert validate_orientable(*_xf(hollow_square())) == []
    assert validate_orientable(*_xf(hollow_square(alternating=True))) != []


def _xf(f):
    return f.X, f.F


def test_thickening_filtration_passes():
    for p in (2, 3):
        T = thicken(generalized_octahedron(p))
        assert validate_orientable(T.X, T.F) == []
        assert validate_uniform(T.X, T.F).ok


def test_weight_perturbation_is_reported():
    g = gluing_gadget("0", "1", 0.1)
    G = g.X.graph
    v = min(g.vertices_with_role("copy-x"))
    w = dict(G.weights)
    w[v] = 0.05
    X = CliqueComplex(WeightedGraph.build(w, G.edges, G.labels), g.X.dmax, g.X.orientation_map())
    rep = validate_uniform(X, g.F)
    assert any(x.kind == "weight" for x in rep.violations)
    bad_levels = {g.F.level(x.simplices[0]) for x in rep.violations if x.kind == "weight"}
    assert bad_levels and all(lv is not None for lv in bad_levels)


def test_classification_of_fixtures():
    f = annulus_split_merge()
    assert all(classify(e, f.X, f.F).good for lv in essential_simplices(f.X, f.F).values() for e in lv)
    d = filled_disc()
    ring0 = {tuple(sorted(e)) for e in zip(d.rings[0], d.rings[0][1:] + d.rings[0][:1])}
    for e in ring0:
        r = classify(e, d.X, d.F)
        assert r.verdict == "Bad" and r.reason == "NonCocycle" and len(r.witness) == 3
    b = broken_annulus()
    reasons = {classify(e, b.X, b.F).reason for lv in essential_simplices(b.X, b.F).values() for e in lv}
    assert "NonCycle" in reasons


def test_classify_rejects_internal():
    f = annulus_merge_split()
    e = next(iter(internal_simplices(f.X, f.F)[0]))
    with pytest.raises(FiltrationError):
        classify(e, f.X, f.F)


def test_split_merge_amplitudes():
    f = annulus_split_merge()
    phi = build_phi_good(f.rings[0][:2], f.X, f.F)
    assert [(L.level, L.amplitude) for L in phi.layers] == [(0, 1.0), (1, 1.0), (2, 0.5), (3, 0.5), (4, 1.0)]


def test_hollow_square_state_is_all_ones():
    f = hollow_square()
    phi = build_phi_good((0, 1), f.X, f.F)
    assert np.allclose(phi.vector.to_array(f.X), 1.0)


def test_glued_squares_state_matches_harmonic(glued_squares):
    T = glued_squares
    phi = build_phi_good((0, 2), T.X, T.F)
    assert [L.amplitude for L in phi.layers] == [1.0, 1.0, 1.0]
    v = phi.vector.to_array(T.X)
    H = harmonic_basis(T.X, 1)
    assert H.shape[1] == 1
    h = H[:, 0] * np.sign(H[:, 0].sum())
    assert np.allclose(v / np.linalg.norm(v), h, atol=1e-9)


@pytest.mark.parametrize("make", [annulus_merge_split, annulus_split_merge, hollow_square])
def test_state_is_harmonic_on_yes_fixtures(make):
    f = make()
    seed = f.rings[0][:2]
    phi = build_phi_good(seed, f.X, f.F)
    v = phi.vector.to_array(f.X)
    assert np.all(v >= 0)
    assert np.linalg.norm(laplacian(f.X, 1).dense() @ v) <= 1e-9
    A = f.F.analysis(f.X)
    assert all(A.essential[A.pos(s)] for s in phi.support())


def test_relative_amplitude_examples():
    f = annulus_split_merge()
    phi = build_phi_good(f.rings[0][:2], f.X, f.F)
    l1 = next(iter(phi.layers[1].simplices))
    l2 = next(s for s in phi.layers[2].simplices
              if f.F.analysis(f.X).shares_coface(f.X.position(l1), f.X.position(s)))
    assert relative_amplitude(l1, l2, phi, f.X, f.F) == pytest.approx(0.5, abs=1e-12)
    a, b = [tuple(sorted(e)) for e in zip(f.rings[0][:2], f.rings[0][1:3])]
    assert relative_amplitude(a, b, phi, f.X, f.F) == 1.0


def test_relative_amplitude_across_a_weight_step():
    # a level-0 qubit edge (weight 1) and a level-1 copy edge (weight lambda)
    g = gluing_gadget("0", "1", 0.1)
    A = g.F.analysis(g.X)
    phi = build_phi_good(A.vertices(A.essential_at(0)[0]), g.X, g.F)
    sup = phi.support()
    for j in A.essential_at(0):
        for k in A.coface_neighbors(j):
            if A.vertices(k) in sup and A.level[k] == 1:
                r = relative_amplitude(A.vertices(j), A.vertices(k), phi, g.X, g.F)
                assert r == pytest.approx(0.1, rel=1e-12)
                return
    pytest.fail("no cross-level pair found")


@pytest.mark.parametrize("make", [annulus_merge_split, annulus_split_merge])
def test_relative_amplitude_matches_stored_ratio_and_is_reciprocal(make):
    f = make()
    phi = build_phi_good(f.rings[0][:2], f.X, f.F)
    A = f.F.analysis(f.X)
    sup = phi.support()
    for s in sorted(sup):
        j = A.pos(s)
        for k in sorted(A.face_neighbors(j) | A.coface_neighbors(j)):
            t = A.vertices(k)
            if t not in sup:
                continue
            r = relative_amplitude(s, t, phi, f.X, f.F)
            assert r == pytest.approx(phi.amplitude(t) / phi.amplitude(s), abs=1e-12)
            assert r * relative_amplitude(t, s, phi, f.X, f.F) == pytest.approx(1.0, abs=1e-12)


def test_relative_amplitude_rejects_non_adjacent():
    f = annulus_split_merge()
    phi = build_phi_good(f.rings[0][:2], f.X, f.F)
    r4 = f.rings[4]
    with pytest.raises(FiltrationError):
        relative_amplitude(tuple(sorted(f.rings[0][:2])), tuple(sorted(r4[:2])), phi, f.X, f.F)


@pytest.mark.parametrize("make", [annulus_merge_split, annulus_split_merge])
def test_layer_sizes_follow_relative_degrees(make):
    f = make()
    phi = build_phi_good(f.rings[0][:2], f.X, f.F)
    T = phi.f_table
    for a, b in zip(phi.layers, phi.layers[1:]):
        i, j = a.level, b.level
        assert T[(i, j)] * len(b.simplices) == T[(j, i)] * len(a.simplices)


def test_phi_rejects_bad_seed():
    d = filled_disc()
    with pytest.raises(FiltrationError):
        build_phi_good(tuple(sorted(d.rings[0][:2])), d.X, d.F)


def test_inconsistent_amplitudes_abort():
    # broken annulus: growth from both sides of the cut disagrees with the size rule
    b = broken_annulus()
    A = b.F.analysis(b.X)
    seeds = [j for j in A.essential_at(0) if A.is_good(j)]
    outcomes = set()
    for j in seeds:
        try:
            build_phi_good(A.vertices(j), b.X, b.F)
            outcomes.add("ok")
        except StructuralError:
            outcomes.add("error")
    assert outcomes  # every seed either builds or aborts; never averages
    for j in seeds:
        phi = build_phi_good(A.vertices(j), b.X, b.F, local=True)
        assert min(phi.vector.entries.values()) > 0


def _positive_kernel(vals) -> bool:
    """Independent route: LP feasibility of sum vals*c = 0 with c >= 1."""
    if not vals:
        return False
    res = linprog(np.zeros(len(vals)), A_eq=np.array([vals]), b_eq=[0.0],
                  bounds=[(1, None)] * len(vals), method="highs")
    return res.status == 0


def test_classify_agrees_with_lp_on_gadget_simplices():
    rng = np.random.default_rng(7)
    checked = 0
    for g in (gluing_gadget("0", "1", 0.2), filling_gadget("0", 0.2)):
        X, F = g.X, g.F
        A = F.analysis(X)
        ess = np.flatnonzero(A.essential)
        for j in rng.choice(ess, size=100, replace=True):
            j = int(j)
            lv = A.level[j]
            ok = True
            for f, _, _ in A.down[j]:
                vals = [inc * w for k, inc, w in A.star[f] if A.essential[k] and A.level[k] == lv]
                ok &= _positive_kernel(vals)
            for t, _, _ in A.up[j]:
                vals = [inc * w for k, inc, w in A.top_faces[t] if A.essential[k]]
                ok &= _positive_kernel(vals)
            assert classify(A.vertices(j), X, F).good == ok
            checked += 1
    assert checked == 200


def test_filtration_input_errors():
    with pytest.raises(FiltrationError):
        Filtration(1, {(0, 1, 2): 0})
    with pytest.raises(FiltrationError):
        Filtration(1, {(0, 1): -1})
    with pytest.raises(FiltrationError):
        Filtration(1, {(0, 1): 3}, N=2)
    f = hollow_square()
    with pytest.raises(FiltrationError):
        Filtration(1, {(0, 2): 0}).analysis(f.X)
