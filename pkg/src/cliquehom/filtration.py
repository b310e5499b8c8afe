"""Uniform orientable filtrations, good/bad simplices and the guiding state.

A filtration is given as an explicit level table on d-simplices; simplices
missing from the table are outside the last subcomplex.  Everything else
(internal simplices, relative degrees, goodness) is derived from the table
and the complex.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .complex import ChainVector, CliqueComplex, ComplexError, OrientedSimplex


class FiltrationError(ValueError):
    """Malformed filtration or a precondition on a simplex that does not hold."""


class StructuralError(RuntimeError):
    """The guiding state cannot be built consistently on this instance."""


@dataclass
class Filtration:
    dim: int
    levels: dict[tuple[int, ...], int]
    N: int | None = None
    layer_weights: dict[int, float] | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.levels = {tuple(int(v) for v in k): int(l) for k, l in self.levels.items()}
        for k, l in self.levels.items():
            if len(k) != self.dim + 1:
                raise FiltrationError(f"{list(k)} is not a {self.dim}-simplex")
            if l < 0:
                raise FiltrationError(f"negative level {l} for {list(k)}")
        top = max(self.levels.values(), default=0)
        if self.N is None:
            self.N = top
        elif top > self.N:
            raise FiltrationError(f"level {top} exceeds N={self.N}")

    def level(self, sigma: OrientedSimplex | Sequence[int]) -> int | None:
        vs = sigma.vertices if isinstance(sigma, OrientedSimplex) else tuple(sigma)
        return self.levels.get(vs)

    def analysis(self, X: CliqueComplex) -> "FiltrationAnalysis":
        key = id(X)
        got = self._cache.get(key)
        if got is None or got.X is not X:
            got = FiltrationAnalysis(X, self)
            self._cache[key] = got
        return got


@dataclass(frozen=True)
class Violation:
    kind: str
    simplices: tuple[tuple[int, ...], ...]
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "simplices": [list(s) for s in self.simplices],
                "detail": self.detail}


@dataclass(frozen=True)
class GoodnessReport:
    verdict: str  # "Good" or "Bad"
    reason: str | None = None  # "NonCycle" or "NonCocycle"
    witness: tuple[int, ...] | None = None

    @property
    def good(self) -> bool:
        return self.verdict == "Good"


class FiltrationAnalysis:
    """Incidence tables plus everything derived from a level table."""

    def __init__(self, X: CliqueComplex, F: Filtration):
        d = F.dim
        if d < 1 or d > X.dmax:
            raise FiltrationError(f"filtration dimension {d} is not available in the complex")
        self.X, self.F, self.d = X, F, d
        n = X.count(d)
        self.level = np.full(n, -1, dtype=np.int64)
        for vs, l in F.levels.items():
            if vs not in X:
                raise FiltrationError(f"{list(vs)} is listed in the filtration but not in the complex")
            self.level[X.position(vs)] = l
        w = X.graph.weights
        verts = X.simplices_vertices(d)
        signs = X.signs(d)
        fsigns = X.signs(d - 1)
        # down[j]: (face position, incidence sign, weight of the removed vertex)
        self.down: list[list[tuple[int, int, float]]] = []
        self.star: dict[int, list[tuple[int, int, float]]] = defaultdict(list)
        for j, vs in enumerate(verts):
            row = []
            for i, v in enumerate(vs):
                f = X.position(vs[:i] + vs[i + 1:])
                inc = int(signs[j]) * int(fsigns[f]) * (-1) ** i
                row.append((f, inc, w[v]))
                self.star[f].append((j, inc, w[v]))
            self.down.append(row)
        self.up: list[list[tuple[int, int, float]]] = [[] for _ in range(n)]
        self.top_faces: list[list[tuple[int, int, float]]] = []
        if d + 1 <= X.dmax:
            tsigns = X.signs(d + 1)
            for t, tv in enumerate(X.simplices_vertices(d + 1)):
                row = []
                for i, v in enumerate(tv):
                    j = X.position(tv[:i] + tv[i + 1:])
                    inc = int(tsigns[t]) * int(signs[j]) * (-1) ** i
                    row.append((j, inc, w[v]))
                    self.up[j].append((t, inc, w[v]))
                self.top_faces.append(row)
        self.internal = self._internal()
        self.essential = (self.level >= 0) & ~self.internal
        self._good: dict[int, GoodnessReport] = {}

    # positions / simplices
    def pos(self, sigma: OrientedSimplex | Sequence[int]) -> int:
        vs = sigma.vertices if isinstance(sigma, OrientedSimplex) else tuple(sigma)
        return self.X.position(vs)

    def vertices(self, j: int) -> tuple[int, ...]:
        return self.X.simplices_vertices(self.d)[j]

    def _internal(self) -> np.ndarray:
        n = len(self.level)
        out = np.zeros(n, dtype=bool)
        for j in range(n):
            lv = self.level[j]
            if lv < 0 or len(self.up[j]) < 2:
                continue
            # same-level simplices in each coface, other than j itself
            groups = [{k for k, _, _ in self.top_faces[t] if k != j and self.level[k] == lv}
                      for t, _, _ in self.up[j]]
            if any(not g for g in groups):
                continue
            cands = sorted(set().union(*groups))
            found = False
            for a in range(len(cands)):
                for b in range(a + 1, len(cands)):
                    s1, s2 = cands[a], cands[b]
                    if not all(s1 in g or s2 in g for g in groups):
                        continue
                    holders1 = [i for i, g in enumerate(groups) if s1 in g]
                    holders2 = [i for i, g in enumerate(groups) if s2 in g]
                    if any(h1 != h2 for h1 in holders1 for h2 in holders2):
                        found = True
                        break
                if found:
                    break
            out[j] = found
        return out

    # ------------------------------------------------------------------
    def levels_present(self) -> list[int]:
        return sorted({int(l) for l in self.level if l >= 0})

    def essential_at(self, lv: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.essential & (self.level == lv))]

    def classify_pos(self, j: int) -> GoodnessReport:
        got = self._good.get(j)
        if got is not None:
            return got
        if not self.essential[j]:
            raise FiltrationError(f"{list(self.vertices(j))} is internal or outside the filtration")
        lv = self.level[j]
        rep = GoodnessReport("Good")
        fverts = self.X.simplices_vertices(self.d - 1)
        for f, _, _ in self.down[j]:
            vals = [inc * wt for k, inc, wt in self.star[f]
                    if self.essential[k] and self.level[k] == lv]
            if not _positive_solution_exists(vals):
                rep = GoodnessReport("Bad", "NonCycle", fverts[f])
                break
        if rep.good:
            tverts = self.X.simplices_vertices(self.d + 1)
            for t, _, _ in self.up[j]:
                vals = [inc * wt for k, inc, wt in self.top_faces[t] if self.essential[k]]
                if not _positive_solution_exists(vals):
                    rep = GoodnessReport("Bad", "NonCocycle", tverts[t])
                    break
        self._good[j] = rep
        return rep

    def is_good(self, j: int) -> bool:
        return bool(self.essential[j]) and self.classify_pos(j).good

    def face_neighbors(self, j: int) -> set[int]:
        return {k for f, _, _ in self.down[j] for k, _, _ in self.star[f] if k != j}

    def coface_neighbors(self, j: int) -> set[int]:
        return {k for t, _, _ in self.up[j] for k, _, _ in self.top_faces[t] if k != j}

    def shares_coface(self, a: int, b: int) -> bool:
        ta = {t for t, _, _ in self.up[a]}
        return any(t in ta for t, _, _ in self.up[b])


def _positive_solution_exists(vals: Iterable[float]) -> bool:
    """Whether sum_k vals[k] * c_k = 0 has a solution with every c_k > 0."""
    vals = list(vals)
    return any(v > 0 for v in vals) and any(v < 0 for v in vals)


def internal_simplices(X: CliqueComplex, F: Filtration) -> dict[int, set[tuple[int, ...]]]:
    """Internal simplices grouped by level."""
    A = F.analysis(X)
    out: dict[int, set[tuple[int, ...]]] = defaultdict(set)
    for j in np.flatnonzero(A.internal):
        out[int(A.level[j])].add(A.vertices(int(j)))
    return dict(out)


def essential_simplices(X: CliqueComplex, F: Filtration) -> dict[int, set[tuple[int, ...]]]:
    A = F.analysis(X)
    out: dict[int, set[tuple[int, ...]]] = defaultdict(set)
    for j in np.flatnonzero(A.essential):
        out[int(A.level[j])].add(A.vertices(int(j)))
    return dict(out)


def validate_orientable(X: CliqueComplex, F: Filtration) -> list[Violation]:
    """Orientation conditions of an orientable filtration; empty list means pass.

    Within a level, essential simplices sharing a face must induce opposite
    orientations on it.  Essential simplices of different levels sharing a
    coface must induce opposite orientations on it, and the leveled faces
    of that coface may come from two levels only.  Faces outside the
    filtration are ignored in the last check.
    """
    A = F.analysis(X)
    out: list[Violation] = []
    fverts = X.simplices_vertices(F.dim - 1)
    for f, members in sorted(A.star.items()):
        ess = [(k, inc) for k, inc, _ in members if A.essential[k]]
        for a in range(len(ess)):
            for b in range(a + 1, len(ess)):
                (ka, ia), (kb, ib) = ess[a], ess[b]
                if A.level[ka] == A.level[kb] and ia * ib > 0:
                    out.append(Violation("down", (A.vertices(ka), A.vertices(kb), fverts[f]),
                                         f"level {A.level[ka]}: same induced orientation on the shared face"))
    tverts = X.simplices_vertices(F.dim + 1) if F.dim + 1 <= X.dmax else []
    for t, members in enumerate(A.top_faces):
        ess = [(k, inc) for k, inc, _ in members if A.essential[k]]
        leveled = {int(A.level[k]) for k, _, _ in members if A.level[k] >= 0}
        if len({int(A.level[k]) for k, _ in ess}) >= 2 and len(leveled) > 2:
            out.append(Violation("partition", (tverts[t],),
                                 f"faces spread over levels {sorted(leveled)}"))
        for a in range(len(ess)):
            for b in range(a + 1, len(ess)):
                (ka, ia), (kb, ib) = ess[a], ess[b]
                if A.level[ka] != A.level[kb] and ia * ib > 0:
                    out.append(Violation("up", (A.vertices(ka), A.vertices(kb), tverts[t]),
                                         f"levels {A.level[ka]} and {A.level[kb]}: same induced orientation on the coface"))
    return out


@dataclass
class UniformReport:
    violations: list[Violation]
    f_table: dict[tuple[int, int], int]
    layer_weights: dict[int, float]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_uniform(X: CliqueComplex, F: Filtration, rtol: float = 1e-12) -> UniformReport:
    """Per-level weight uniformity and constant relative degrees f^{i,j}."""
    A = F.analysis(X)
    out: list[Violation] = []
    weights = X.weights(F.dim)
    layer_w: dict[int, float] = {}
    for lv in A.levels_present():
        members = np.flatnonzero(A.level == lv)
        ref = F.layer_weights.get(lv) if F.layer_weights else None
        if ref is None:
            ref = float(weights[members[0]])
        layer_w[lv] = float(ref)
        for j in members:
            if abs(weights[j] - ref) > rtol * max(abs(ref), 1e-300):
                out.append(Violation("weight", (A.vertices(int(j)),),
                                     f"level {lv}: weight {weights[j]:.6g} differs from {ref:.6g}"))
    seen: dict[tuple[int, int], dict[int, tuple[int, ...]]] = defaultdict(dict)
    tverts = X.simplices_vertices(F.dim + 1) if F.dim + 1 <= X.dmax else []
    for t, members in enumerate(A.top_faces):
        leveled = [k for k, _, _ in members if A.level[k] >= 0]
        lvls = sorted({int(A.level[k]) for k in leveled})
        if len(lvls) != 2:
            continue
        for i, j in (lvls, lvls[::-1]):
            cnt = sum(1 for k in leveled if A.level[k] == i and A.essential[k])
            seen[(i, j)].setdefault(cnt, tverts[t])
    f_table: dict[tuple[int, int], int] = {}
    for key, counts in sorted(seen.items()):
        if len(counts) > 1:
            out.append(Violation("relative-degree", tuple(counts.values()),
                                 f"f^{{{key[0]},{key[1]}}} takes values {sorted(counts)}"))
        f_table[key] = min(counts)
    return UniformReport(out, f_table, layer_w)


def classify(sigma: OrientedSimplex | Sequence[int], X: CliqueComplex, F: Filtration) -> GoodnessReport:
    A = F.analysis(X)
    return A.classify_pos(A.pos(sigma))


# ----------------------------------------------------------------------
@dataclass(frozen=True)
class Layer:
    stage: int
    level: int
    simplices: frozenset[tuple[int, ...]]
    amplitude: float  # coefficient on the unweighted basis |sigma>


@dataclass
class PhiGood:
    base: tuple[int, ...]
    vector: ChainVector
    layers: list[Layer]
    f_table: dict[tuple[int, int], int]
    weights: dict[tuple[int, ...], float]
    level_of: dict[tuple[int, ...], int]

    def amplitude(self, sigma: OrientedSimplex | Sequence[int]) -> float:
        vs = sigma.vertices if isinstance(sigma, OrientedSimplex) else tuple(sigma)
        return self.vector.entries.get(vs, 0.0)

    def support(self) -> set[tuple[int, ...]]:
        return self.vector.support()


def build_phi_good(sigma0: OrientedSimplex | Sequence[int], X: CliqueComplex, F: Filtration,
                   require_level0: bool = False, local: bool = False) -> PhiGood:
    """Non-negative guiding state grown from a good essential seed.

    Stage 0 is the good component of the seed inside its own level; each
    later stage collects the unvisited good essential simplices sharing a
    coface with the previous stage, closed under face-adjacency within their
    level.  A set at (stage i, level j) gets the unweighted coefficient
    |stage 0| / |set|, converted to the normalized basis by the weight.

    With ``local`` the coefficient of a set is instead the smallest value
    predicted from its predecessors by the relative degrees, which is all a
    verifier can compute from local data.  On a valid instance the two
    agree; otherwise the size rule raises ``StructuralError``.
    """
    A = F.analysis(X)
    j0 = A.pos(sigma0)
    if not A.essential[j0]:
        raise FiltrationError(f"{list(A.vertices(j0))} is internal or outside the filtration")
    if require_level0 and A.level[j0] != 0:
        raise FiltrationError("the seed must lie at level 0")
    rep = A.classify_pos(j0)
    if not rep.good:
        raise FiltrationError(f"seed {list(A.vertices(j0))} is bad ({rep.reason})")
    f_table = validate_uniform(X, F).f_table

    def closure(start: set[int], lv: int, visited: set[int]) -> set[int]:
        comp, todo = set(start), list(start)
        while todo:
            k = todo.pop()
            for f, _, _ in A.down[k]:
                for k2, _, _ in A.star[f]:
                    if (k2 not in comp and k2 not in visited and A.level[k2] == lv
                            and A.is_good(k2)):
                        comp.add(k2)
                        todo.append(k2)
        return comp

    visited: set[int] = set()
    stage0 = closure({j0}, int(A.level[j0]), visited)
    visited |= stage0
    size0 = len(stage0)
    amp: dict[int, float] = {k: 1.0 for k in stage0}
    layers = [Layer(0, int(A.level[j0]), frozenset(A.vertices(k) for k in stage0), 1.0)]
    frontier = {int(A.level[j0]): stage0}
    stage = 0
    while frontier:
        stage += 1
        reached: dict[int, set[int]] = defaultdict(set)
        predicted: dict[int, set[float]] = defaultdict(set)
        for plv, members in frontier.items():
            for k in members:
                for t, _, _ in A.up[k]:
                    for k2, _, _ in A.top_faces[t]:
                        if k2 in visited or not A.essential[k2] or not A.is_good(k2):
                            continue
                        lv = int(A.level[k2])
                        reached[lv].add(k2)
                        if lv != plv and (plv, lv) in f_table and f_table[(lv, plv)]:
                            predicted[k2].add(amp[k] * f_table[(plv, lv)] / f_table[(lv, plv)])
        frontier = {}
        for lv in sorted(reached):
            comp = closure(reached[lv] - visited, lv, visited)
            if not comp:
                continue
            a = size0 / len(comp)
            if local:
                preds = [p for k in comp for p in predicted.get(k, ())]
                a = min(preds) if preds else a
            for k in comp:
                for p in predicted.get(k, ()):
                    if not local and abs(p - a) > 1e-9 * max(1.0, a):
                        raise StructuralError(
                            f"{list(A.vertices(k))} reached with inconsistent amplitudes {p:g} and {a:g}")
                amp[k] = a
            visited |= comp
            layers.append(Layer(stage, lv, frozenset(A.vertices(k) for k in comp), a))
            frontier[lv] = comp
    weights = X.weights(F.dim)
    vec = ChainVector(F.dim, {A.vertices(k): a * weights[k] for k, a in amp.items()})
    return PhiGood(A.vertices(j0), vec, layers, f_table,
                   {A.vertices(k): float(weights[k]) for k in amp},
                   {A.vertices(k): int(A.level[k]) for k in amp})


def relative_amplitude(sigma, sigma_p, phi: PhiGood, X: CliqueComplex, F: Filtration) -> float:
    """<[sigma']|phi> / <[sigma]|phi> from relative degrees and weights only.

    Same-level neighbours carry equal unweighted coefficients; across a
    shared coface between levels i and j the unweighted ratio is
    f^{i,j} / f^{j,i}.  Other neighbours are reached by a shortest chain of
    such steps through support simplices adjacent to sigma or sigma'.
    """
    A = F.analysis(X)
    a, b = A.pos(sigma), A.pos(sigma_p)
    sup = phi.support()
    va, vb = A.vertices(a), A.vertices(b)
    if va not in sup or vb not in sup:
        raise FiltrationError("both simplices must lie in the support of the guiding state")
    near_a = A.face_neighbors(a) | A.coface_neighbors(a)
    if b not in near_a and a != b:
        raise FiltrationError(f"{list(va)} and {list(vb)} are not adjacent")
    direct = _direct_ratio(A, a, b, phi.f_table)
    if direct is not None:
        return direct
    pool = sorted(k for k in near_a | A.face_neighbors(b) | A.coface_neighbors(b) | {a, b}
                  if A.vertices(k) in sup)
    ratio = {a: 1.0}
    todo = [a]
    while todo:
        nxt = []
        for c in todo:
            for k in pool:
                if k in ratio:
                    continue
                r = _direct_ratio(A, c, k, phi.f_table)
                if r is not None:
                    ratio[k] = ratio[c] * r
                    nxt.append(k)
        if b in ratio:
            return ratio[b]
        todo = nxt
    raise FiltrationError(f"{list(va)} and {list(vb)} are not linked inside the support")


def _direct_ratio(A: FiltrationAnalysis, a: int, b: int, f_table) -> float | None:
    la, lb = int(A.level[a]), int(A.level[b])
    wa, wb = A.X.weight(A.vertices(a)), A.X.weight(A.vertices(b))
    if a == b:
        return 1.0
    if la != lb and A.shares_coface(a, b):
        return f_table[(la, lb)] * wb / (f_table[(lb, la)] * wa)
    if la == lb and (b in A.face_neighbors(a) or b in A.coface_neighbors(a)):
        return wb / wa
    return None
