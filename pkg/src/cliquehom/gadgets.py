"""Qubit graphs, octahedron thickenings and the gadget compiler for stoquastic SAT.

Vertex bookkeeping: every vertex carries a ``VertexInfo`` with its block
(qubit index), its label k in 1..4 and a role.  Labels {1,2} and {3,4} of a
block form its two vertex pairs; a simplex with at most one vertex per pair
is oriented by listing its vertices in pair order and taking the sign
(-1)^(sum of labels).  Qubit vertex ids are 8*block + 4*bit + (k - 1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .complex import (ChainVector, CliqueComplex, ComplexError, TooLargeError,
                      WeightedGraph, oriented)
from .filtration import Filtration
from .sat import Projector, SATError, StoquasticSAT

MAX_QUBITS = 4
MAX_GADGET_QUBITS = 2
DEFAULT_LAMBDA = 0.1


def scheduled_lambda(terms: int, gap: float, c: float = 1.0) -> float:
    """Asymptotic weight choice c * gap / terms; not used by the desk-scale defaults."""
    if terms < 1 or gap <= 0 or c <= 0:
        raise ValueError("need terms >= 1, gap > 0 and c > 0")
    return c * gap / terms


class ConstructionError(RuntimeError):
    """A construction did not produce the structure it is supposed to."""


@dataclass(frozen=True)
class VertexInfo:
    role: str  # qubit, copy-x, copy-y, core, central-4c, center-vc, octahedron, prime
    block: int | None = None
    k: int | None = None
    term: int | None = None

    def pair(self):
        if self.k is None or self.role in ("central-4c", "center-vc"):
            return None
        return (self.block, (self.k - 1) // 2)


def rule_sign(vs: Sequence[int], info: dict[int, VertexInfo]) -> int | None:
    """Orientation of a sorted simplex from the pair-order rule, or None.

    None means the simplex uses a vertex outside every pair or two vertices
    of one pair, so the rule does not apply.
    """
    keyed = []
    for v in vs:
        p = info[v].pair()
        if p is None:
            return None
        keyed.append((p, v))
    pairs = [p for p, _ in keyed]
    if len(set(pairs)) != len(pairs):
        return None
    ordered = [v for _, v in sorted(keyed)]
    s = oriented(ordered).sign
    return s * (-1) ** sum(info[v].k for v in vs)


def apply_rule(X: CliqueComplex, d: int, info: dict[int, VertexInfo]):
    for vs in X.simplices_vertices(d):
        s = rule_sign(vs, info)
        if s is not None:
            X.set_sign(vs, s)


# ----------------------------------------------------------------------
# qubit graph and encoding

def qubit_vertex(block: int, bit: int, k: int) -> int:
    return 8 * block + 4 * bit + (k - 1)


SQUARE = ((1, 3), (3, 2), (2, 4), (4, 1))


@dataclass
class QubitGraph:
    n: int
    graph: WeightedGraph
    info: dict[int, VertexInfo]

    def block(self, v: int) -> int:
        return self.info[v].block


def _qubit_parts(n: int, connector: bool = True):
    weights, labels, info, edges = {}, {}, {}, set()
    for i in range(n):
        for x in (0, 1):
            for k in range(1, 5):
                v = qubit_vertex(i, x, k)
                weights[v] = 1.0
                labels[v] = f"{k}_{i}^{x}"
                info[v] = VertexInfo("qubit", i, k)
            for a, b in SQUARE:
                edges.add((qubit_vertex(i, x, a), qubit_vertex(i, x, b)))
        if connector:
            edges.add((qubit_vertex(i, 0, 4), qubit_vertex(i, 1, 4)))
    verts = sorted(weights)
    for u, v in itertools.combinations(verts, 2):
        if info[u].block != info[v].block:
            edges.add((u, v))
    return weights, labels, info, edges


def qubit_graph(n: int, connector: bool = True, max_qubits: int = MAX_QUBITS) -> QubitGraph:
    """n blocks of two squares 1-3-2-4 joined by 4^0-4^1, all blocks joined."""
    if n < 1:
        raise ComplexError("need at least one qubit")
    if n > max_qubits:
        raise TooLargeError(f"n={n} exceeds the desk-scale cap of {max_qubits} qubits")
    weights, labels, info, edges = _qubit_parts(n, connector)
    return QubitGraph(n, WeightedGraph.build(weights, edges, labels), info)


def qubit_complex(n: int, connector: bool = True) -> tuple[CliqueComplex, dict[int, VertexInfo]]:
    Q = qubit_graph(n, connector)
    X = CliqueComplex(Q.graph, 2 * n)
    apply_rule(X, 2 * n - 1, Q.info)
    return X, Q.info


def _square_edges(block: int, bit: int) -> list[tuple[int, int]]:
    return [tuple(sorted((qubit_vertex(block, bit, a), qubit_vertex(block, bit, b))))
            for a, b in SQUARE]


def encode_basis_state(X: CliqueComplex, x: str) -> ChainVector:
    """Enc(x): product of the square cycles, coefficient 2^-n on every simplex.

    Coefficients are reported in the complex's orientation, which for the
    pair-order rule makes all of them positive.
    """
    n = len(x)
    if 2 * n - 1 > X.dmax:
        raise ComplexError(f"bitstring of length {n} does not fit a complex of dimension {X.dmax}")
    out = ChainVector(2 * n - 1)
    for combo in itertools.product(*[SQUARE for _ in range(n)]):
        ordered = []
        for i, (a, b) in enumerate(combo):
            ordered += [qubit_vertex(i, int(x[i]), a), qubit_vertex(i, int(x[i]), b)]
        s = oriented(ordered)
        # unnormalized coefficient 2^-n on the ordered simplex, times w(sigma)
        out.add(s, 2.0 ** -n * X.weight(s.vertices), X)
    return out


def encode(X: CliqueComplex, psi: dict[str, float]) -> ChainVector:
    vec = None
    for x, a in sorted(psi.items()):
        e = encode_basis_state(X, x).scaled(a)
        vec = e if vec is None else vec + e
    if vec is None:
        raise ComplexError("empty state")
    return vec


# ----------------------------------------------------------------------
# generalized octahedra and thickenings

def generalized_octahedron(p: int) -> CliqueComplex:
    """Join of p vertex pairs {1,2}*{3,4}*...; vertex k has id k-1."""
    if p < 1:
        raise ComplexError("need at least one pair")
    ids = list(range(2 * p))
    edges = [(u, v) for u, v in itertools.combinations(ids, 2) if u // 2 != v // 2]
    G = WeightedGraph.build({v: 1.0 for v in ids}, edges, {v: str(v + 1) for v in ids})
    X = CliqueComplex(G, p - 1)
    info = _octahedron_info(p)
    if p >= 2:
        apply_rule(X, p - 1, info)
    return X


def _octahedron_info(p: int, primed: bool = False) -> dict[int, VertexInfo]:
    info = {}
    for v in range(2 * p):
        info[v] = VertexInfo("octahedron", v // 4, (v % 4) + 1)
        if primed:
            info[v + 2 * p] = VertexInfo("prime", v // 4, (v % 4) + 1)
    return info


@dataclass
class Thickening:
    """Triangulated K x I with its gluing layers.

    ``layers[k]`` is the essential layer with the last k pairs primed;
    ``cells[k-1]`` and ``internal[k-1]`` are the top cells and the internal
    faces added at stage k.
    """

    p: int
    X: CliqueComplex
    prime: dict[int, int]
    layers: list[list[tuple[int, ...]]]
    cells: list[list[tuple[int, ...]]]
    internal: list[list[tuple[int, ...]]]
    F: Filtration


def _layer(A: list[list[int]], B: list[list[int]], k: int) -> list[tuple[int, ...]]:
    P = len(A)
    choices = [A[r] if r < P - k else B[r] for r in range(P)]
    return [tuple(sorted(c)) for c in itertools.product(*choices)]


def _stage(A: list[list[int]], B: list[list[int]], k: int):
    """Top cells and internal faces of stage k (pivot pair P-k, 0-based)."""
    P = len(A)
    r = P - k
    cells, internal = [], []
    for pre in itertools.product(*A[:r]):
        for a in range(2):
            for suf in itertools.product(*B[r + 1:]):
                cell = list(pre) + [A[r][a], B[r][a]] + list(suf)
                cells.append(cell)
                for i in range(len(pre)):
                    internal.append(tuple(sorted(cell[:i] + cell[i + 1:])))
    return cells, internal


def thicken(K: CliqueComplex, order: Sequence[int] | None = None) -> Thickening:
    """K x I as a clique complex: K, a primed copy, verticals u-u' and u-v' for u<v.

    The cliques are checked against the staircase triangulation of each top
    simplex of K; any mismatch raises ``ConstructionError``.
    """
    verts = K.graph.vertices
    order = list(order) if order is not None else verts
    if sorted(order) != verts:
        raise ConstructionError("the order must list every vertex of K once")
    rank = {v: i for i, v in enumerate(order)}
    off = max(verts) + 1
    prime = {v: v + off for v in verts}
    edges = set(K.graph.edges) | {(prime[u], prime[v]) for u, v in K.graph.edges}
    edges |= {(v, prime[v]) for v in verts}
    for u, v in K.graph.edges:
        a, b = (u, v) if rank[u] < rank[v] else (v, u)
        edges.add((a, prime[b]))
    weights = {v: 1.0 for v in verts} | {prime[v]: 1.0 for v in verts}
    labels = {v: K.graph.label(v) for v in verts} | {prime[v]: K.graph.label(v) + "'" for v in verts}
    G = WeightedGraph.build(weights, edges, labels)
    top = K.dmax
    X = CliqueComplex(G, top + 1)
    expect = set()
    for s in K.simplices_vertices(top):
        seq = sorted(s, key=rank.get)
        for i in range(len(seq)):
            expect.add(tuple(sorted(seq[:i + 1] + [prime[v] for v in seq[i:]])))
    got = set(X.simplices_vertices(top + 1))
    if got != expect:
        raise ConstructionError(
            f"thickening cliques differ from the triangulation ({len(got)} vs {len(expect)} cells)")
    p = len(verts) // 2
    pairs = sorted({tuple(sorted(v for v in verts if v // 2 == q)) for q in range(p)},
                   key=lambda pr: min(rank[v] for v in pr))
    for a, b in zip(pairs, pairs[1:]):
        if max(rank[v] for v in a) > min(rank[v] for v in b):
            raise ConstructionError(f"the order interleaves the pairs {a} and {b}")
    A = [list(pr) for pr in pairs]
    B = [[prime[v] for v in pr] for pr in pairs]
    # labels are 1..2p for both copies; pair order follows the pairs of K
    label = {v: v + 1 for v in verts} | {prime[v]: v + 1 for v in verts}
    pair_of = {v: idx for idx, pr in enumerate(pairs) for v in pr}
    pair_of |= {prime[v]: q for v, q in list(pair_of.items())}
    for vs in X.simplices_vertices(top):
        qs = [pair_of[v] for v in vs]
        if len(set(qs)) == len(qs):
            ordered = [v for _, v in sorted(zip(qs, vs))]
            X.set_sign(vs, oriented(ordered).sign * (-1) ** sum(label[v] for v in vs))
    layers = [_layer(A, B, k) for k in range(p + 1)]
    cells, internal = [], []
    levels: dict[tuple[int, ...], int] = {s: 0 for s in layers[0]}
    for k in range(1, p + 1):
        cs, ints = _stage(A, B, k)
        for c in cs:
            # orient the cell so that its face in layer k-1 appears with +1
            r = p - k
            face = tuple(sorted(c[:r + 1] + c[r + 2:]))
            inc = oriented(c).sign * (-1) ** sorted(c).index(c[r + 1])
            X.set_sign(tuple(sorted(c)), inc * X.sign(face))
        cells.append([tuple(sorted(c)) for c in cs])
        internal.append(sorted(set(ints)))
        for s in layers[k]:
            levels[s] = k
        for s in internal[-1]:
            levels[s] = k
    return Thickening(p, X, prime, layers, cells, internal, Filtration(top, levels))


def gluing_layers(T: Thickening):
    """Stage cells and essential layers of a thickening, after checking that
    the cells of all stages partition the top simplices."""
    allcells = [c for cs in T.cells for c in cs]
    top = set(T.X.simplices_vertices(T.X.dmax))
    if len(allcells) != len(set(allcells)) or set(allcells) != top:
        raise ConstructionError("stage cells do not partition the thickening")
    return T.cells, T.layers


# ----------------------------------------------------------------------
# gadget complexes

@dataclass
class TermGadget:
    term: Projector
    index: int
    blocks: list[int]
    copies: dict[str, dict[tuple[int, int], int]]
    centers: dict[int, int]
    cone: int | None
    first_level: int
    last_level: int


@dataclass
class GadgetComplex:
    sat: StoquasticSAT
    n: int
    lam: float
    graph: WeightedGraph
    X: CliqueComplex
    F: Filtration
    info: dict[int, VertexInfo]
    terms: list[TermGadget]
    candidates: set[tuple[int, ...]] = field(default_factory=set)
    dropped: set[tuple[int, ...]] = field(default_factory=set)

    @property
    def dim(self) -> int:
        return 2 * self.n - 1

    def vertices_with_role(self, role: str) -> set[int]:
        return {v for v, i in self.info.items() if i.role == role}


def _pairs(blocks: list[int]) -> list[tuple[int, int]]:
    return [(i, h) for i in blocks for h in (0, 1)]


def _pair_members(copy: dict[tuple[int, int], int], pair: tuple[int, int]) -> list[int]:
    i, h = pair
    return [copy[(i, 2 * h + 1)], copy[(i, 2 * h + 2)]]


def _octa_edges(copy: dict[tuple[int, int], int]) -> set[tuple[int, int]]:
    out = set()
    for (a, va), (b, vb) in itertools.combinations(copy.items(), 2):
        if (a[0], (a[1] - 1) // 2) != (b[0], (b[1] - 1) // 2):
            out.add((min(va, vb), max(va, vb)))
    return out


def _thick_edges(A: dict, B: dict) -> set[tuple[int, int]]:
    """Vertical edges plus A(u)-B(v) for octahedron edges with u before v."""
    out = set()
    for key in A:
        out.add(tuple(sorted((A[key], B[key]))))
    keys = sorted(A)  # (block, k) sorts in pair order
    for u, v in itertools.combinations(keys, 2):
        if (u[0], (u[1] - 1) // 2) != (v[0], (v[1] - 1) // 2):
            out.add(tuple(sorted((A[u], B[v]))))
    return out


def _square_products(blocks: list[int]) -> list[tuple[int, ...]]:
    """Products of square edges over the given blocks (both bits per block)."""
    per_block = [[e for x in (0, 1) for e in _square_edges(i, x)] for i in blocks]
    return [tuple(sorted(v for e in combo for v in e)) for combo in itertools.product(*per_block)]


def combine(sat: StoquasticSAT, lam: float = DEFAULT_LAMBDA, central: bool = True,
            max_qubits: int = MAX_GADGET_QUBITS) -> GadgetComplex:
    """Qubit graph plus one gadget per term, with the concatenated filtration."""
    n = sat.n
    if n > max_qubits:
        raise TooLargeError(f"combined gadgets are limited to {max_qubits} qubits")
    if not 0 < lam < 1:
        raise ConstructionError("lambda must lie in (0, 1)")
    weights, labels, info, edges = _qubit_parts(n)
    nxt = 8 * n

    def new(role, block, k, term, label):
        nonlocal nxt
        v = nxt
        nxt += 1
        weights[v] = lam
        labels[v] = label
        info[v] = VertexInfo(role, block, k, term)
        return v

    all_blocks = list(range(n))
    levels: dict[tuple[int, ...], int] = {s: 0 for s in _square_products(all_blocks)}
    candidates: set[tuple[int, ...]] = set()
    gadgets: list[TermGadget] = []
    level = 0

    def assign(simplices, lv, rest, internal=False):
        for s in simplices:
            for r in rest:
                key = tuple(sorted(s + r))
                old = levels.get(key)
                if old is not None and old != lv:
                    raise ConstructionError(f"{key} assigned to levels {old} and {lv}")
                levels[key] = lv
                if internal:
                    candidates.add(key)

    for t, term in enumerate(sat.terms):
        order = sorted(range(term.m), key=lambda r: term.qubits[r])
        I = [term.qubits[r] for r in order]
        bx = {I[j]: int(term.x[order[j]]) for j in range(term.m)}
        by = {I[j]: int(term.y[order[j]]) for j in range(term.m)} if term.y else None
        rest_blocks = [i for i in all_blocks if i not in I]
        rest = _square_products(rest_blocks) if rest_blocks else [()]
        m = term.m
        P = 2 * m
        qx = {(i, k): qubit_vertex(i, bx[i], k) for i in I for k in range(1, 5)}
        copies = {"x": qx}
        copies["x'"] = {(i, k): new("copy-x", i, k, t, f"{k}'_{i}^x[t{t}]") for i in I for k in range(1, 5)}
        term_edges = set()
        for i in I:
            for x in (0, 1):
                term_edges |= set(_square_edges(i, x))
            term_edges.add((qubit_vertex(i, 0, 4), qubit_vertex(i, 1, 4)))
        for u, v in itertools.combinations([qubit_vertex(i, x, k) for i in I for x in (0, 1)
                                            for k in range(1, 5)], 2):
            if info[u].block != info[v].block:
                term_edges.add((u, v))
        term_edges |= _octa_edges(copies["x'"]) | _thick_edges(qx, copies["x'"])
        thick = [(qx, copies["x'"])]
        if term.kind == "diff":
            qy = {(i, k): qubit_vertex(i, by[i], k) for i in I for k in range(1, 5)}
            copies["y"] = qy
            copies["core"] = {(i, k): new("core", i, k, t, f"{k}''_{i}[t{t}]") for i in I for k in range(1, 5)}
            copies["y'"] = {(i, k): new("copy-y", i, k, t, f"{k}'_{i}^y[t{t}]") for i in I for k in range(1, 5)}
            for c in ("core", "y'"):
                term_edges |= _octa_edges(copies[c])
            term_edges |= _thick_edges(copies["core"], copies["x'"])
            term_edges |= _thick_edges(copies["core"], copies["y'"])
            term_edges |= _thick_edges(qy, copies["y'"])
        centers: dict[int, int] = {}
        cone = None
        gverts = [v for c, cp in copies.items() if c not in ("x", "y") for v in cp.values()]
        if term.kind == "diff" and central:
            nb: dict[int, set[int]] = {}
            for u, v in term_edges:
                nb.setdefault(u, set()).add(v)
                nb.setdefault(v, set()).add(u)
            new_edges = set()
            for i in I:
                fours = {copies[c][(i, 4)] for c in ("x", "x'", "core", "y'", "y")}
                c4 = new("central-4c", i, 4, t, f"4c_{i}[t{t}]")
                centers[i] = c4
                reach = set(fours)
                for f in fours:
                    reach |= {u for u in nb.get(f, ()) if info[u].block != i}
                new_edges |= {(min(c4, u), max(c4, u)) for u in reach}
            term_edges |= new_edges
            gverts += list(centers.values())
        if term.kind == "basis":
            cone = new("center-vc", None, None, t, f"vc[t{t}]")
            term_edges |= {(min(cone, v), max(cone, v)) for v in copies["x'"].values()}
            gverts.append(cone)
        for g in gverts:
            for i in rest_blocks:
                for x in (0, 1):
                    for k in range(1, 5):
                        term_edges.add(tuple(sorted((g, qubit_vertex(i, x, k)))))
        edges |= term_edges

        pairs = _pairs(I)

        def seq(copy):
            return [_pair_members(copy, pr) for pr in pairs]

        first = level + 1
        Ax, Bx = seq(qx), seq(copies["x'"])
        for k in range(1, P + 1):
            assign(_layer(Ax, Bx, k), level + k, rest)
            assign(_stage(Ax, Bx, k)[1], level + k, rest, internal=True)
        if term.kind == "diff":
            Ay, By = seq(copies["y"]), seq(copies["y'"])
            for k in range(1, P + 1):
                assign(_layer(Ay, By, k), level + k, rest)
                assign(_stage(Ay, By, k)[1], level + k, rest, internal=True)
            C = seq(copies["core"])
            # K'x back to K'' one layer per level, then out from K'' to K'y;
            # internal faces of a cell join the later of its two layers
            for q in range(P - 1, -1, -1):
                lv = level + 2 * P - q
                assign(_layer(C, Bx, q), lv, rest)
                assign(_stage(C, Bx, q + 1)[1], lv, rest, internal=True)
            for q in range(1, P):
                lv = level + 2 * P + q
                assign(_layer(C, By, q), lv, rest)
                assign(_stage(C, By, q)[1], lv, rest, internal=True)
            if _stage(C, By, P)[1]:
                raise ConstructionError("the last stage should have no internal faces")
            level += 3 * P - 1
        else:
            conesimp = []
            for face in itertools.combinations(sorted(copies["x'"].values()), P - 1):
                if all((min(a, b), max(a, b)) in term_edges for a, b in itertools.combinations(face, 2)):
                    conesimp.append(tuple(sorted(face + (cone,))))
            assign(conesimp, level + P, rest, internal=True)
            level += P
        gadgets.append(TermGadget(term, t, I, copies, centers, cone, first, level))

    G = WeightedGraph.build(weights, edges, labels)
    X = CliqueComplex(G, 2 * n)
    apply_rule(X, 2 * n - 1, info)
    missing = [s for s in levels if s not in X]
    if missing:
        raise ConstructionError(f"filtration lists non-simplices, e.g. {missing[0]}")
    dropped: set[tuple[int, ...]] = set()
    while True:
        F = Filtration(2 * n - 1, dict(levels), N=level)
        A = F.analysis(X)
        bad = {s for s in candidates if s in levels and not A.internal[X.position(s)]}
        if not bad:
            break
        for s in bad:
            del levels[s]
        dropped |= bad
    return GadgetComplex(sat, n, lam, G, X, F, info, gadgets, candidates, dropped)


def gluing_gadget(x: str, y: str, lam: float = DEFAULT_LAMBDA, central: bool = True) -> GadgetComplex:
    """The gadget for (|x>-|y>)(<x|-<y|)/2 acting on all m = len(x) qubits."""
    m = len(x)
    return combine(StoquasticSAT(m, (Projector.diff(range(m), x, y),)), lam, central)


def filling_gadget(x: str, lam: float = DEFAULT_LAMBDA) -> GadgetComplex:
    """The gadget for |x><x| acting on all m = len(x) qubits."""
    m = len(x)
    return combine(StoquasticSAT(m, (Projector.basis(range(m), x),)), lam)


# ----------------------------------------------------------------------
# harmonization

def _bits(a: int, n: int) -> str:
    return format(a, f"0{n}b")


def harmonize(psi, gadget: GadgetComplex, tol: float = 1e-9) -> ChainVector:
    """Lift a uniform-subset kernel state of H to a harmonic chain.

    ``psi`` is a length-2^n array or a dict from bitstrings to amplitudes.
    Every difference term whose x-side string lies in the support adds the
    chain of layers through its gadget, joined with the untouched blocks'
    part of that string.
    """
    n = gadget.n
    if isinstance(psi, dict):
        vec = np.zeros(2 ** n)
        for b, a in psi.items():
            vec[int(b, 2)] = a
    else:
        vec = np.asarray(psi, dtype=float)
    if vec.shape != (2 ** n,):
        raise SATError(f"state must have {2 ** n} amplitudes")
    H = gadget.sat.hamiltonian()
    if np.linalg.norm(H @ vec) > tol * max(1.0, np.linalg.norm(vec)):
        raise SATError("state is not in the kernel of the SAT Hamiltonian")
    sup = np.flatnonzero(np.abs(vec) > tol)
    amps = vec[sup]
    if len(sup) == 0 or np.any(amps < 0) or np.ptp(amps) > tol * max(1.0, amps.max()):
        raise SATError("state must be a non-negative uniform superposition of basis states")
    X = gadget.X
    support = {_bits(int(a), n): float(vec[a]) for a in sup}
    acc = dict(encode(X, support).entries)
    for g in gadget.terms:
        if g.term.kind != "diff":
            continue
        I = g.blocks
        order = sorted(range(g.term.m), key=lambda r: g.term.qubits[r])
        xI = "".join(g.term.x[r] for r in order)
        rest_blocks = [i for i in range(n) if i not in I]
        pairs = _pairs(I)

        def seq(copy):
            return [_pair_members(copy, pr) for pr in pairs]

        Ax, Bx = seq(g.copies["x"]), seq(g.copies["x'"])
        Ay, By = seq(g.copies["y"]), seq(g.copies["y'"])
        C = seq(g.copies["core"])
        P = 2 * g.term.m
        chain = []
        for k in range(1, P + 1):
            chain += _layer(Ax, Bx, k) + _layer(Ay, By, k)
        for q in range(P - 1, -1, -1):
            chain += _layer(C, Bx, q)
            if q:
                chain += _layer(C, By, q)
        for b, a in support.items():
            if "".join(b[i] for i in I) != xI:
                continue
            rest = _rest_cycle(b, rest_blocks)
            coef = a * 2.0 ** -n
            for s in chain:
                for r in rest:
                    key = tuple(sorted(s + r))
                    sgn = rule_sign(key, gadget.info)
                    if sgn is None:
                        raise ConstructionError(f"{key} has no rule orientation")
                    acc[key] = acc.get(key, 0.0) + coef * X.weight(key) * sgn * X.sign(key)
    return ChainVector(2 * n - 1, acc)


def _rest_cycle(b: str, blocks: list[int]):
    """Simplices of the untouched blocks' square product for bitstring b."""
    if not blocks:
        return [()]
    per = [_square_edges(i, int(b[i])) for i in blocks]
    return [tuple(sorted(v for e in combo for v in e)) for combo in itertools.product(*per)]
