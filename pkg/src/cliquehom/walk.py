"""Fixed-node Laplacians, the guided random walk and the verification protocol.

The walk lives on the support of a non-negative guiding state phi.  From a
simplex s it moves to s' with probability

    phi(s') / phi(s) * <s'| I - beta F |s>

where F is the fixed-node operator of the full Laplacian relative to phi.
Rows are stochastic wherever Delta phi vanishes locally, which the protocol
enforces by rejecting whenever a neighbourhood contains a bad simplex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .complex import CliqueComplex, ComplexError, OrientedSimplex
from .filtration import (Filtration, FiltrationError, PhiGood, StructuralError,
                         build_phi_good)
from .operators import SparseOperator, laplacian

RATIO_SLACK = 1e-9
ROW_TOL = 1e-10
EXACT_CAP = 5000
CHUNK = 1024


class WalkError(ValueError):
    pass


@dataclass
class FixedNodeOperator:
    """F^{Delta, phi}: sign-violating off-diagonals moved onto the diagonal."""

    base: sp.csr_matrix
    phi: np.ndarray
    matrix: sp.csr_matrix

    def row(self, j: int) -> dict[int, float]:
        r = self.matrix.getrow(j)
        return {int(k): float(v) for k, v in zip(r.indices, r.data)}

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()


def fixed_node(delta, phi) -> FixedNodeOperator:
    """Fixed-node operator of a symmetric matrix relative to a real state."""
    M = delta.matrix if isinstance(delta, SparseOperator) else sp.csr_matrix(delta)
    if isinstance(phi, PhiGood):
        phi = phi.vector.to_array(delta.X)
    phi = np.asarray(phi, dtype=float)
    if not np.any(phi):
        raise WalkError("the guiding state is zero")
    C = M.tocoo()
    off = C.row != C.col
    pos = off & (C.data * phi[C.row] * phi[C.col] > 0)
    extra = np.zeros(M.shape[0])
    np.add.at(extra, C.row[pos], C.data[pos] * phi[C.col[pos]] / phi[C.row[pos]])
    keep = ~pos
    F = sp.csr_matrix((C.data[keep], (C.row[keep], C.col[keep])), shape=M.shape)
    F = F + sp.diags(extra)
    F = sp.csr_matrix(F)
    F.eliminate_zeros()
    return FixedNodeOperator(sp.csr_matrix(M), phi, F)


def choose_beta(F: FixedNodeOperator, phi=None) -> float:
    """1 / max diagonal of F over the support of phi."""
    phi = F.phi if phi is None else np.asarray(phi)
    sup = np.flatnonzero(phi)
    top = float(F.diagonal()[sup].max()) if len(sup) else 0.0
    if top <= 0:
        raise WalkError("the fixed-node diagonal is not positive on the support")
    return 1.0 / top


def choose_length(beta: float, epsilon: float, state_count: int) -> int:
    """Smallest L with sqrt(state_count) * (1 - beta*epsilon)**L <= 1/3."""
    be = beta * epsilon
    if be >= 1:
        return 1
    if be <= 0:
        raise WalkError("beta * epsilon must be positive")
    return max(1, math.ceil(math.log(3 * math.sqrt(state_count)) / -math.log1p(-be)))


@dataclass
class VerifierParams:
    epsilon: float
    beta: float | None = None
    L: int | None = None
    seed: int = 0


@dataclass
class TransitionKernel:
    """Transition rows on the support of the guiding state.

    ``states`` are complex positions of the support, sorted; rows list
    (target position, probability) in that same order.
    """

    X: CliqueComplex
    F: Filtration
    phi: PhiGood
    phi_array: np.ndarray
    fixed: FixedNodeOperator
    beta: float
    states: list[int]
    neighbours: dict[int, list[int]]
    _rows: dict[int, list[tuple[int, float]]] = field(default_factory=dict, repr=False)
    _hood: dict[int, tuple | None] = field(default_factory=dict, repr=False)

    def transition_row(self, j: int) -> list[tuple[int, float]]:
        got = self._rows.get(j)
        if got is not None:
            return got
        if self.phi_array[j] <= 0:
            raise WalkError(f"{list(self.X.simplices_vertices(self.F.dim)[j])} is outside the support")
        fr = self.fixed.row(j)
        out = []
        for k in sorted(set(fr) | {j}):
            if self.phi_array[k] <= 0:
                continue
            p = (1.0 if k == j else 0.0) - self.beta * fr.get(k, 0.0)
            p *= self.phi_array[k] / self.phi_array[j]
            if p > 0 or k == j:
                out.append((k, max(p, 0.0)))
        self._rows[j] = out
        return out

    def bad_neighbourhood(self, j: int):
        """None when j and its neighbours are good, else the first bad simplex."""
        if j in self._hood:
            return self._hood[j]
        A = self.F.analysis(self.X)
        hit = None
        for k in [j] + self.neighbours.get(j, []):
            if A.essential[k] and not A.is_good(k):
                hit = A.vertices(k)
                break
        self._hood[j] = hit
        return hit

    def checked_row(self, j: int) -> list[tuple[int, float]]:
        row = self.transition_row(j)
        s = sum(p for _, p in row)
        if abs(s - 1.0) > ROW_TOL:
            raise StructuralError(
                f"row of {list(self.X.simplices_vertices(self.F.dim)[j])} sums to {s!r}")
        return row


def build_kernel(X: CliqueComplex, F: Filtration, sigma0, beta: float | None = None,
                 phi: PhiGood | None = None) -> TransitionKernel:
    d = F.dim
    A = F.analysis(X)
    if phi is None:
        phi = build_phi_good(sigma0, X, F, local=True)
    arr = phi.vector.to_array(X)
    Fx = fixed_node(laplacian(X, d), arr)
    if beta is None:
        beta = choose_beta(Fx, arr)
    neighbours = {}
    for j in range(X.count(d)):
        if arr[j] > 0:
            neighbours[j] = sorted((A.face_neighbors(j) | A.coface_neighbors(j)) - {j})
    return TransitionKernel(X, F, phi, arr, Fx, beta, sorted(neighbours), neighbours)


@dataclass
class WalkTrace:
    sequence: list[tuple[int, ...]]
    ratios: list[float]
    outcome: str  # "Accept" or "Reject"
    reason: str | None = None  # BadWitness, BadNeighbor, RatioProduct
    step: int | None = None
    witness: tuple[int, ...] | None = None

    @property
    def accepted(self) -> bool:
        return self.outcome == "Accept"

    def to_json(self) -> dict:
        return {"outcome": self.outcome, "reason": self.reason, "step": self.step,
                "bad_simplex": list(self.witness) if self.witness else None,
                "sequence": [list(s) for s in self.sequence], "ratios": self.ratios}


def uniforms(seed: int, count: int) -> np.ndarray:
    """The first ``count`` draws of the counter-based stream keyed by ``seed``.

    Draw t depends only on (seed, t), so truncating or extending a walk
    never changes earlier steps.
    """
    return np.random.Generator(np.random.Philox(key=int(seed) % 2**64)).random(count)


def _cdf(row: list[tuple[int, float]]) -> np.ndarray:
    """Cumulative row with the last entry forced to +inf so every u lands."""
    c = np.cumsum([p for _, p in row])
    c[-1] = np.inf
    return c


def _sample(row: list[tuple[int, float]], u: float) -> int:
    return row[int(np.sum(_cdf(row) <= u))][0]


@dataclass
class Protocol:
    """Everything the verifier derives from the instance and the witness."""

    kernel: TransitionKernel | None
    L: int
    beta: float
    epsilon: float
    witness: tuple[int, ...]
    rejection: WalkTrace | None = None


def prepare(X: CliqueComplex, F: Filtration, witness, params: VerifierParams) -> Protocol:
    """Witness checks, guiding state, beta and L for one protocol run."""
    d = F.dim
    A = F.analysis(X)
    vs = witness.vertices if isinstance(witness, OrientedSimplex) else tuple(sorted(witness))
    L = params.L
    if vs not in X or len(vs) != d + 1:
        raise WalkError(f"witness {list(vs)} is not a {d}-simplex of the complex")
    j0 = A.pos(vs)
    reject = WalkTrace([vs], [], "Reject", "BadWitness", 0, vs)
    if not A.essential[j0] or not A.is_good(j0):
        return Protocol(None, L or 0, params.beta or 0.0, params.epsilon, vs, reject)
    try:
        K = build_kernel(X, F, vs, params.beta)
    except StructuralError:
        return Protocol(None, L or 0, params.beta or 0.0, params.epsilon, vs, reject)
    if L is None:
        L = choose_length(K.beta, params.epsilon, X.count(d))
    return Protocol(K, L, K.beta, params.epsilon, vs)


def walk(proto: Protocol, seed: int) -> WalkTrace:
    """One run of the verifier with the stream keyed by ``seed``."""
    if proto.rejection is not None:
        return proto.rejection
    K = proto.kernel
    verts = K.X.simplices_vertices(K.F.dim)
    j = j0 = K.X.position(proto.witness)
    gen = np.random.Generator(np.random.Philox(key=int(seed) % 2**64))
    seq, ratios = [verts[j]], []
    for t in range(proto.L + 1):
        bad = K.bad_neighbourhood(j)
        if bad is not None:
            return WalkTrace(seq, ratios, "Reject", "BadNeighbor", t, bad)
        if t == proto.L:
            break
        if t % CHUNK == 0:
            u = gen.random(min(CHUNK, proto.L - t))
        nxt = _sample(K.checked_row(j), u[t % CHUNK])
        ratios.append(float(K.phi_array[nxt] / K.phi_array[j]))
        j = nxt
        seq.append(verts[j])
    if K.phi_array[j] / K.phi_array[j0] > 1 + RATIO_SLACK:
        return WalkTrace(seq, ratios, "Reject", "RatioProduct", proto.L, None)
    return WalkTrace(seq, ratios, "Accept")


def verify(X: CliqueComplex, F: Filtration, witness, params: VerifierParams,
           seed: int | None = None) -> WalkTrace:
    return walk(prepare(X, F, witness, params), params.seed if seed is None else seed)


def _dense_rows(proto: Protocol):
    """Index map, good-neighbourhood mask and row data over the support."""
    K = proto.kernel
    idx = {j: i for i, j in enumerate(K.states)}
    good = np.array([K.bad_neighbourhood(j) is None for j in K.states])
    rows = {j: K.checked_row(j) for j in K.states if good[idx[j]]}
    return idx, good, rows



def run_many(proto: Protocol, seeds) -> np.ndarray:
    """Accept flags for many seeds at once; equal to calling ``walk`` per seed.

    Uniforms are drawn from each seed's stream in chunks, and the loop stops
    early once every run has been rejected.
    """
    seeds = list(seeds)
    if proto.rejection is not None:
        return np.zeros(len(seeds), dtype=bool)
    K = proto.kernel
    idx, good, rows = _dense_rows(proto)
    S = len(K.states)
    width = max([len(r) for r in rows.values()] + [1])
    cum = np.full((S, width), np.inf)
    tgt = np.zeros((S, width), dtype=np.int64)
    for j, row in rows.items():
        i = idx[j]
        cum[i, :len(row)] = _cdf(row)
        tgt[i, :len(row)] = [idx[k] for k, _ in row]
        tgt[i, len(row):] = idx[row[-1][0]]
    start = idx[K.X.position(proto.witness)]
    state = np.full(len(seeds), start)
    alive = np.ones(len(seeds), dtype=bool)
    gens = [np.random.Generator(np.random.Philox(key=int(s) % 2**64)) for s in seeds]
    U = np.zeros((len(seeds), 0))
    for t in range(proto.L + 1):
        alive &= good[state]
        if t == proto.L or not alive.any():
            break
        c = t % CHUNK
        if c == 0:
            n = min(CHUNK, proto.L - t)
            U = np.stack([g.random(n) for g in gens])
        k = np.sum(cum[state] <= U[:, c][:, None], axis=1)
        state = np.where(alive, tgt[state, k], state)
    phi = K.phi_array[np.array(K.states)]
    ok = phi[state] / phi[start] <= 1 + RATIO_SLACK
    return alive & ok


def acceptance_probability_exact(X: CliqueComplex, F: Filtration, witness,
                                 params: VerifierParams) -> float:
    """Exact acceptance mass by propagating the walk distribution."""
    return exact_acceptance(prepare(X, F, witness, params))


STEP_LIMIT = 20_000


def exact_acceptance(proto: Protocol) -> float:
    if proto.rejection is not None:
        return 0.0
    K = proto.kernel
    S = len(K.states)
    if S > EXACT_CAP:
        raise WalkError(f"state space {S} exceeds {EXACT_CAP}")
    idx, good, rows = _dense_rows(proto)
    start = idx[K.X.position(proto.witness)]
    phi = K.phi_array[np.array(K.states)]
    ok = phi / phi[start] <= 1 + RATIO_SLACK
    # states reachable through good neighbourhoods; if none of them can
    # reject, acceptance is exactly one
    seen, todo = {start}, [start]
    while todo:
        i = todo.pop()
        if not good[i]:
            continue
        for k, p in rows[K.states[i]]:
            if p > 0 and idx[k] not in seen:
                seen.add(idx[k])
                todo.append(idx[k])
    reach = np.array(sorted(seen))
    if good[reach].all() and ok[reach].all():
        return 1.0
    r, c, v = [], [], []
    for j, row in rows.items():
        for k, p in row:
            r.append(idx[j])
            c.append(idx[k])
            v.append(p)
    P = sp.csr_matrix((v, (r, c)), shape=(S, S))
    dist = np.zeros(S)
    dist[start] = 1.0
    if proto.L <= STEP_LIMIT:
        for t in range(proto.L):
            dist = P.T @ np.where(good, dist, 0.0)
    else:
        # one step kills mass on bad neighbourhoods and then moves it
        T = P.T.toarray() * good[None, :]
        dist = np.linalg.matrix_power(T, proto.L) @ dist
    dist = np.where(good, dist, 0.0)
    return float(min(1.0, max(0.0, dist[ok].sum())))


def honest_witness(X: CliqueComplex, F: Filtration) -> tuple[int, ...]:
    """Max-amplitude simplex of a guiding state grown from a good level-0 seed.

    Falls back to seeds at higher levels when level 0 has no good simplex.
    Ties are broken by the lexicographically smallest vertex tuple.
    """
    A = F.analysis(X)
    for lv in A.levels_present():
        seeds = [j for j in A.essential_at(lv) if A.is_good(j)]
        best = None
        covered: set[tuple[int, ...]] = set()
        for j in seeds:
            if A.vertices(j) in covered:
                continue
            try:
                phi = build_phi_good(A.vertices(j), X, F, local=True)
            except StructuralError:
                continue
            covered |= phi.support()
            top = max(phi.vector.entries.values())
            cands = sorted(k for k, c in phi.vector.entries.items()
                           if c >= top * (1 - 1e-12))
            cand = (-top, cands[0])
            if best is None or cand < best:
                best = cand
        if best is not None:
            return best[1]
    raise FiltrationError("no good essential simplex to seed a witness")
