"""Weighted graphs, oriented simplices and clique complexes.

Simplices are stored as strictly increasing vertex tuples.  The orientation a
complex assigns to a simplex is a sign relative to that sorted order, so the
oriented simplex ``-[0, 1]`` is the same thing as ``[1, 0]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_CLIQUE_CAP = 10**6


class ComplexError(ValueError):
    """Raised for structurally invalid graphs, simplices or chains."""


class DegenerateSimplexError(ComplexError):
    pass


class TooLargeError(ComplexError):
    """The instance exceeds a desk-scale size cap."""


@dataclass(frozen=True)
class WeightedGraph:
    weights: dict[int, float]
    edges: frozenset[tuple[int, int]]
    labels: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        for v, w in self.weights.items():
            if not w > 0:
                raise ComplexError(f"vertex {v} has non-positive weight {w}")
        for u, v in self.edges:
            if u == v:
                raise ComplexError(f"self-loop at vertex {u}")
            if u not in self.weights or v not in self.weights:
                raise ComplexError(f"edge ({u}, {v}) uses an undeclared vertex")

    @classmethod
    def build(cls, weights: Mapping[int, float] | Sequence[float],
              edges: Iterable[tuple[int, int]],
              labels: Mapping[int, str] | None = None) -> "WeightedGraph":
        if not isinstance(weights, Mapping):
            weights = dict(enumerate(weights))
        norm = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ComplexError(f"self-loop at vertex {u}")
            norm.add((min(u, v), max(u, v)))
        return cls({int(k): float(w) for k, w in weights.items()}, frozenset(norm),
                   dict(labels or {}))

    @property
    def vertices(self) -> list[int]:
        return sorted(self.weights)

    def neighbors(self) -> dict[int, set[int]]:
        nb: dict[int, set[int]] = {v: set() for v in self.weights}
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return nb

    def label(self, v: int) -> str:
        return self.labels.get(v, str(v))


@dataclass(frozen=True, order=True)
class OrientedSimplex:
    vertices: tuple[int, ...]
    sign: int = 1

    def __post_init__(self):
        vs = self.vertices
        if any(a >= b for a, b in zip(vs, vs[1:])):
            raise ComplexError(f"vertices {vs} are not strictly increasing")
        if self.sign not in (1, -1):
            raise ComplexError(f"sign must be +1 or -1, got {self.sign}")
        if len(vs) == 1 and self.sign != 1:
            raise ComplexError("a vertex carries no orientation")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def flipped(self) -> "OrientedSimplex":
        return OrientedSimplex(self.vertices, -self.sign)

    def __repr__(self):
        s = "+" if self.sign > 0 else "-"
        return f"{s}{list(self.vertices)}"


def canonicalize(ordered: Sequence[int]) -> tuple[OrientedSimplex, int]:
    """Sort an ordered vertex list; return the simplex and the permutation parity."""
    vs = [int(v) for v in ordered]
    if len(set(vs)) != len(vs):
        raise DegenerateSimplexError(f"repeated vertex in {vs}")
    # parity by counting inversions
    inv = sum(1 for i in range(len(vs)) for j in range(i + 1, len(vs)) if vs[i] > vs[j])
    parity = -1 if inv % 2 else 1
    return OrientedSimplex(tuple(sorted(vs))), parity


def oriented(ordered: Sequence[int]) -> OrientedSimplex:
    """The oriented simplex [v0, v1, ...] written in sorted form with a sign."""
    s, parity = canonicalize(ordered)
    if s.dim == 0:
        return s
    return OrientedSimplex(s.vertices, parity)


def faces(sigma: OrientedSimplex, X: "CliqueComplex | None" = None
          ) -> list[tuple[OrientedSimplex, int]]:
    """Codimension-one faces with their incidence signs.

    The i-th entry removes the i-th smallest vertex.  Without a complex the
    faces carry sign +1 and the incidence is ``sigma.sign * (-1)**i``.  With a
    complex the faces carry the complex's orientation and the incidence is
    taken relative to it.
    """
    if sigma.dim < 1:
        raise ComplexError("a vertex has no faces")
    out = []
    vs = sigma.vertices
    for i in range(len(vs)):
        fv = vs[:i] + vs[i + 1:]
        s = sigma.sign * (-1) ** i
        if X is None:
            out.append((OrientedSimplex(fv), s))
        else:
            fs = X.sign(fv)
            out.append((OrientedSimplex(fv, fs), s * fs))
    return out


def cofaces(sigma: OrientedSimplex, X: "CliqueComplex") -> list[tuple[OrientedSimplex, int]]:
    """All (d+1)-simplices of X containing sigma, with incidence signs."""
    d = sigma.dim
    if d + 1 > X.dmax:
        raise ComplexError(f"complex has no simplices of dimension {d + 1}")
    out = []
    for t in X.coface_index(d)[X.position(sigma.vertices)]:
        tv = X.simplices_vertices(d + 1)[t]
        i = next(k for k in range(len(tv)) if tv[:k] + tv[k + 1:] == sigma.vertices)
        ts = X.sign(tv)
        out.append((OrientedSimplex(tv, ts), ts * (-1) ** i * sigma.sign))
    return out


def simplex_weight(sigma: OrientedSimplex | Sequence[int], graph: WeightedGraph) -> float:
    vs = sigma.vertices if isinstance(sigma, OrientedSimplex) else sigma
    return float(np.prod([graph.weights[v] for v in vs]))


def _enumerate(graph: WeightedGraph, dmax: int, cap: int) -> list[list[tuple[int, ...]]]:
    nb = graph.neighbors()
    higher = {v: {u for u in nb[v] if u > v} for v in nb}
    out: list[list[tuple[int, ...]]] = [[] for _ in range(dmax + 1)]

    def extend(clique: tuple[int, ...], cand: set[int]):
        d = len(clique) - 1
        out[d].append(clique)
        if len(out[d]) > cap:
            raise TooLargeError(f"more than {cap} simplices of dimension {d}; "
                                "instance too large for desk scale")
        if d == dmax:
            return
        for u in sorted(cand):
            extend(clique + (u,), cand & higher[u])

    for v in sorted(nb):
        extend((v,), higher[v])
    return [sorted(level) for level in out]


class CliqueComplex:
    """Clique complex of a weighted graph truncated at dimension dmax.

    ``orientation`` maps sorted vertex tuples to -1 where the chosen
    orientation is opposite to the sorted order; all others are +1.
    """

    def __init__(self, graph: WeightedGraph, dmax: int,
                 orientation: Mapping[tuple[int, ...], int] | None = None,
                 cap: int = DEFAULT_CLIQUE_CAP):
        if dmax < 0:
            raise ComplexError("dmax must be non-negative")
        self.graph = graph
        self.dmax = dmax
        self._verts = _enumerate(graph, dmax, cap)
        self._index = [{s: i for i, s in enumerate(level)} for level in self._verts]
        self._signs = [np.ones(len(level), dtype=np.int8) for level in self._verts]
        self._cofaces: dict[int, list[list[int]]] = {}
        for vs, s in (orientation or {}).items():
            self.set_sign(tuple(vs), s)

    # lookups -------------------------------------------------------------
    def simplices_vertices(self, d: int) -> list[tuple[int, ...]]:
        if d < 0 or d > self.dmax:
            return []
        return self._verts[d]

    def simplices(self, d: int) -> list[OrientedSimplex]:
        return [OrientedSimplex(v, int(s) if d > 0 else 1)
                for v, s in zip(self.simplices_vertices(d), self.signs(d))]

    def signs(self, d: int) -> np.ndarray:
        if d < 0 or d > self.dmax:
            return np.ones(0, dtype=np.int8)
        return self._signs[d]

    def count(self, d: int) -> int:
        return len(self.simplices_vertices(d))

    def __contains__(self, vs) -> bool:
        vs = vs.vertices if isinstance(vs, OrientedSimplex) else tuple(vs)
        d = len(vs) - 1
        return 0 <= d <= self.dmax and vs in self._index[d]

    def position(self, vs: Sequence[int]) -> int:
        vs = tuple(vs)
        try:
            return self._index[len(vs) - 1][vs]
        except (KeyError, IndexError):
            raise ComplexError(f"{list(vs)} is not a simplex of the complex") from None

    def sign(self, vs: Sequence[int]) -> int:
        vs = tuple(vs)
        return int(self._signs[len(vs) - 1][self.position(vs)])

    def oriented(self, vs: Sequence[int]) -> OrientedSimplex:
        vs = tuple(vs)
        return OrientedSimplex(vs, self.sign(vs) if len(vs) > 1 else 1)

    def set_sign(self, vs: tuple[int, ...], s: int):
        if s not in (1, -1):
            raise ComplexError(f"orientation sign must be +1 or -1, got {s}")
        if len(vs) == 1 and s != 1:
            raise ComplexError("a vertex carries no orientation")
        self._signs[len(vs) - 1][self.position(vs)] = s

    def orient(self, ordered: Sequence[int]):
        """Choose the orientation given by an ordered vertex list."""
        s = oriented(ordered)
        self.set_sign(s.vertices, s.sign)

    def orientation_map(self) -> dict[tuple[int, ...], int]:
        out = {}
        for d in range(1, self.dmax + 1):
            for vs, s in zip(self._verts[d], self._signs[d]):
                if s < 0:
                    out[vs] = -1
        return out

    def weight(self, vs: Sequence[int]) -> float:
        return simplex_weight(tuple(vs), self.graph)

    def weights(self, d: int) -> np.ndarray:
        w = self.graph.weights
        return np.array([np.prod([w[v] for v in s]) for s in self.simplices_vertices(d)])

    def coface_index(self, d: int) -> list[list[int]]:
        """For each d-simplex, positions of its cofaces among the (d+1)-simplices."""
        if d not in self._cofaces:
            co: list[list[int]] = [[] for _ in range(self.count(d))]
            idx = self._index[d] if d <= self.dmax else {}
            for t, tv in enumerate(self.simplices_vertices(d + 1)):
                for i in range(len(tv)):
                    co[idx[tv[:i] + tv[i + 1:]]].append(t)
            self._cofaces[d] = co
        return self._cofaces[d]

    def degree(self, vs: Sequence[int]) -> int:
        vs = tuple(vs)
        d = len(vs) - 1
        if d + 1 > self.dmax:
            return 0
        return len(self.coface_index(d)[self.position(vs)])

    def __repr__(self):
        counts = [self.count(d) for d in range(self.dmax + 1)]
        return f"CliqueComplex(dmax={self.dmax}, counts={counts})"


def enumerate_cliques(graph: WeightedGraph, dmax: int, cap: int = DEFAULT_CLIQUE_CAP,
                      orientation: Mapping[tuple[int, ...], int] | None = None) -> CliqueComplex:
    return CliqueComplex(graph, dmax, orientation, cap)


class ChainVector:
    """Sparse chain in the normalized basis, keyed by sorted vertex tuples.

    Coefficients always refer to the orientation the complex has chosen for
    each simplex; adding a value on the opposite orientation negates it.
    """

    def __init__(self, dim: int, entries: Mapping[tuple[int, ...], float] | None = None):
        self.dim = dim
        self.entries: dict[tuple[int, ...], float] = {}
        for k, c in (entries or {}).items():
            k = tuple(k)
            if len(k) != dim + 1:
                raise ComplexError(f"key {k} does not have dimension {dim}")
            self.entries[k] = float(c)

    def add(self, sigma: OrientedSimplex, c: float, X: CliqueComplex):
        if sigma.dim != self.dim:
            raise ComplexError(f"{sigma} does not have dimension {self.dim}")
        s = sigma.sign * X.sign(sigma.vertices) if self.dim > 0 else 1
        k = sigma.vertices
        self.entries[k] = self.entries.get(k, 0.0) + s * c

    def get(self, sigma: OrientedSimplex | Sequence[int], X: CliqueComplex | None = None) -> float:
        if isinstance(sigma, OrientedSimplex):
            c = self.entries.get(sigma.vertices, 0.0)
            if X is not None and self.dim > 0:
                c *= sigma.sign * X.sign(sigma.vertices)
            return c
        return self.entries.get(tuple(sigma), 0.0)

    def to_array(self, X: CliqueComplex) -> np.ndarray:
        a = np.zeros(X.count(self.dim))
        for k, c in self.entries.items():
            a[X.position(k)] = c
        return a

    @classmethod
    def from_array(cls, X: CliqueComplex, dim: int, arr: np.ndarray, tol: float = 0.0):
        vs = X.simplices_vertices(dim)
        return cls(dim, {vs[i]: float(arr[i]) for i in np.flatnonzero(np.abs(arr) > tol)})

    def support(self, tol: float = 0.0) -> set[tuple[int, ...]]:
        return {k for k, c in self.entries.items() if abs(c) > tol}

    def norm(self) -> float:
        return float(np.sqrt(sum(c * c for c in self.entries.values())))

    def scaled(self, a: float) -> "ChainVector":
        return ChainVector(self.dim, {k: a * c for k, c in self.entries.items()})

    def __add__(self, other: "ChainVector") -> "ChainVector":
        if other.dim != self.dim:
            raise ComplexError("dimension mismatch")
        out = dict(self.entries)
        for k, c in other.entries.items():
            out[k] = out.get(k, 0.0) + c
        return ChainVector(self.dim, out)

    def __sub__(self, other: "ChainVector") -> "ChainVector":
        return self + other.scaled(-1.0)

    def __repr__(self):
        return f"ChainVector(dim={self.dim}, nnz={len(self.entries)})"
