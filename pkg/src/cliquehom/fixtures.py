"""Small leveled annuli and related complexes used by tests, demos and the CLI.

Every fixture is built from concentric rings of edges.  Ring edges are
oriented along the ring in one rotational direction, which makes each ring
a cycle and every triangle between two consecutive rings induce opposite
orientations from its two ring edges.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complex import CliqueComplex, WeightedGraph
from .filtration import Filtration


@dataclass
class Fixture:
    X: CliqueComplex
    F: Filtration
    rings: list[list[int]]
    note: str = ""


class _Builder:
    def __init__(self):
        self.n = 0
        self.labels: dict[int, str] = {}
        self.edges: set[tuple[int, int]] = set()
        self.levels: dict[tuple[int, int], int] = {}
        self.orient: list[tuple[int, int]] = []

    def vertex(self, label: str) -> int:
        v = self.n
        self.n += 1
        self.labels[v] = label
        return v

    def edge(self, u: int, v: int, level: int | None = None, directed: bool = False):
        e = (min(u, v), max(u, v))
        self.edges.add(e)
        if level is not None:
            self.levels[e] = level
        if directed:
            self.orient.append((u, v))

    def ring(self, cyc: list[int], level: int):
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            self.edge(a, b, level, directed=True)

    def build(self, weights: dict[int, float] | None = None) -> tuple[CliqueComplex, Filtration]:
        w = {v: 1.0 for v in range(self.n)}
        w.update(weights or {})
        G = WeightedGraph.build(w, self.edges, self.labels)
        X = CliqueComplex(G, 2)
        for u, v in self.orient:
            X.orient((u, v))
        return X, Filtration(1, dict(self.levels))


def annulus_merge_split(n0: int = 8) -> Fixture:
    """Four rings with amplitudes 1, 1, 2, 1 and f-table
    f01 = f10 = 1, f12 = 2, f21 = 1, f23 = 1, f32 = 2.

    Ring 1 replaces every odd vertex of ring 0 by a new vertex; ring 2 joins
    the new vertices by chords; ring 3 subdivides the chords again.
    The radial edges between ring 0 and ring 1 are internal at level 0.
    """
    if n0 < 8 or n0 % 4:
        raise ValueError("n0 must be a multiple of 4 and at least 8")
    b = _Builder()
    p = [b.vertex(f"p{k}") for k in range(n0)]
    q = {k: b.vertex(f"q{k}") for k in range(1, n0, 2)}
    b.ring(p, 0)
    r1 = [p[k] if k % 2 == 0 else q[k] for k in range(n0)]
    b.ring(r1, 1)
    for k in q:
        b.edge(p[k], q[k], 0)
    r2 = [q[k] for k in range(1, n0, 2)]
    b.ring(r2, 2)
    r3 = []
    for i, k in enumerate(range(1, n0, 2)):
        s = b.vertex(f"s{k}")
        nxt = r2[(i + 1) % len(r2)]
        b.edge(q[k], s)
        b.edge(s, nxt)
        r3 += [q[k], s]
    b.ring(r3, 3)
    X, F = b.build()
    return Fixture(X, F, [p, r1, r2, r3], "merge-split annulus")


def annulus_split_merge(n0: int = 4, weights: dict[str, float] | None = None) -> Fixture:
    """Five rings with amplitudes 1, 1, 1/2, 1/2, 1.

    Ring 1 swaps the odd vertices of ring 0 for new ones (radials internal
    at level 1), ring 2 subdivides ring 1, ring 3 replaces the even vertices
    of ring 2 by copies joined to the originals by unleveled radials, and
    ring 4 joins consecutive copies by chords.  ``weights`` maps vertex-label
    prefixes to weights.
    """
    if n0 < 4 or n0 % 2:
        raise ValueError("n0 must be even and at least 4")
    b = _Builder()
    a = [b.vertex(f"a{k}") for k in range(n0)]
    b.ring(a, 0)
    bb = {k: b.vertex(f"b{k}") for k in range(1, n0, 2)}
    r1 = [a[k] if k % 2 == 0 else bb[k] for k in range(n0)]
    b.ring(r1, 1)
    for k in bb:
        b.edge(a[k], bb[k], 1)
    r2 = []
    for k in range(n0):
        c = b.vertex(f"c{k}")
        b.edge(r1[k], c)
        b.edge(c, r1[(k + 1) % n0])
        r2 += [r1[k], c]
    b.ring(r2, 2)
    r3 = []
    for k, v in enumerate(r2):
        if k % 2 == 0:
            cp = b.vertex(f"{b.labels[v]}'")
            b.edge(v, cp)
            r3.append(cp)
        else:
            r3.append(v)
    b.ring(r3, 3)
    r4 = r3[0::2]
    b.ring(r4, 4)
    w = {}
    for v, lab in b.labels.items():
        for pre, val in (weights or {}).items():
            if lab.startswith(pre):
                w[v] = val
    X, F = b.build(w)
    return Fixture(X, F, [a, r1, r2, r3, r4], "split-merge annulus")


def filled_disc(n0: int = 4) -> Fixture:
    """The split-merge annulus with its inner hole coned off by one vertex.

    Cone edges stay outside the filtration, so the innermost ring edges
    meet a coface with a single essential face and are non-cocycles.
    """
    base = annulus_split_merge(n0)
    G = base.X.graph
    z = max(G.weights) + 1
    edges = set(G.edges) | {(a, z) for a in base.rings[0]}
    labels = dict(G.labels)
    labels[z] = "z"
    G2 = WeightedGraph.build({**G.weights, z: 1.0}, edges, labels)
    X = CliqueComplex(G2, 2, base.X.orientation_map())
    return Fixture(X, Filtration(1, dict(base.F.levels)), base.rings, "filled disc")


def broken_annulus(n0: int = 8) -> Fixture:
    """The split-merge annulus cut along one radial line of vertices.

    Removing a0 and its copy a0' opens every ring, leaving ring edges whose
    end vertex has a single same-level edge: non-cycles.  The two radials
    next to the cut lose a coface and with it their internal status, so they
    are taken out of the filtration.
    """
    base = annulus_split_merge(n0)
    G = base.X.graph
    cut = {v for v, lab in G.labels.items() if lab in ("a0", "a0'")}
    keep = sorted(set(G.weights) - cut)
    relabel = {v: i for i, v in enumerate(keep)}
    edges = {(relabel[u], relabel[v]) for u, v in G.edges if u not in cut and v not in cut}
    G2 = WeightedGraph.build({relabel[v]: G.weights[v] for v in keep}, edges,
                             {relabel[v]: G.labels[v] for v in keep})
    orient = {tuple(relabel[v] for v in vs): s for vs, s in base.X.orientation_map().items()
              if not set(vs) & cut}
    X = CliqueComplex(G2, 2, orient)
    near = {v for v, lab in G.labels.items() if lab in ("a1", f"a{n0 - 1}")}
    levels = {tuple(relabel[v] for v in vs): lv for vs, lv in base.F.levels.items()
              if not set(vs) & cut and not (lv == 1 and set(vs) & near and _radial(G, vs))}
    rings = [[relabel[v] for v in r if v not in cut] for r in base.rings]
    return Fixture(X, Filtration(1, levels), rings, "broken annulus")


def hollow_square(alternating: bool = False) -> Fixture:
    """A single 4-cycle at level 0, coherently oriented unless ``alternating``."""
    b = _Builder()
    v = [b.vertex(str(k)) for k in range(4)]
    if alternating:
        for k in range(4):
            e = (v[k], v[(k + 1) % 4]) if k % 2 == 0 else (v[(k + 1) % 4], v[k])
            b.edge(*e, level=0, directed=True)
    else:
        b.ring(v, 0)
    X, F = b.build()
    return Fixture(X, F, [v], "hollow square")



def _radial(G: WeightedGraph, vs) -> bool:
    labs = sorted(G.labels[v][0] for v in vs)
    return labs == ["a", "b"]
