"""Stoquastic SAT instances built from basis and difference projectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SATError(ValueError):
    pass


def _check_bits(s: str, name: str):
    if not s or any(ch not in "01" for ch in s):
        raise SATError(f"{name} must be a non-empty bitstring, got {s!r}")


@dataclass(frozen=True)
class Projector:
    """Either |x><x| or (|x>-|y>)(<x|-<y|)/2 on the listed qubits."""

    qubits: tuple[int, ...]
    x: str
    y: str | None = None

    def __post_init__(self):
        _check_bits(self.x, "x")
        if len(set(self.qubits)) != len(self.qubits):
            raise SATError(f"repeated qubit in {self.qubits}")
        if len(self.x) != len(self.qubits):
            raise SATError(f"bitstring {self.x} does not match qubits {self.qubits}")
        if self.y is not None:
            _check_bits(self.y, "y")
            if len(self.y) != len(self.x):
                raise SATError("x and y must have equal length")
            if self.y == self.x:
                raise SATError("a difference projector needs x != y")

    @classmethod
    def basis(cls, qubits, x: str) -> "Projector":
        return cls(tuple(int(q) for q in qubits), x)

    @classmethod
    def diff(cls, qubits, x: str, y: str) -> "Projector":
        return cls(tuple(int(q) for q in qubits), x, y)

    @property
    def kind(self) -> str:
        return "basis" if self.y is None else "diff"

    @property
    def m(self) -> int:
        return len(self.qubits)

    def local_matrix(self) -> np.ndarray:
        dim = 2 ** self.m
        v = np.zeros(dim)
        v[int(self.x, 2)] = 1.0
        if self.y is None:
            return np.outer(v, v)
        v[int(self.y, 2)] = -1.0
        return 0.5 * np.outer(v, v)

    def to_json(self) -> dict:
        out = {"type": self.kind, "qubits": list(self.qubits), "x": self.x}
        if self.y is not None:
            out["y"] = self.y
        return out


@dataclass(frozen=True)
class StoquasticSAT:
    n: int
    terms: tuple[Projector, ...]

    def __post_init__(self):
        if self.n < 1:
            raise SATError("need at least one qubit")
        for t in self.terms:
            if any(q < 0 or q >= self.n for q in t.qubits):
                raise SATError(f"term on qubits {t.qubits} exceeds n={self.n}")

    def hamiltonian(self) -> np.ndarray:
        """Dense sum of the projectors; qubit 0 is the most significant bit."""
        dim = 2 ** self.n
        H = np.zeros((dim, dim))
        for t in self.terms:
            loc = t.local_matrix()
            for a in range(dim):
                bits = format(a, f"0{self.n}b")
                sub_a = int("".join(bits[q] for q in t.qubits), 2)
                for sub_b in np.flatnonzero(loc[sub_a]):
                    sb = format(int(sub_b), f"0{t.m}b")
                    bb = list(bits)
                    for q, ch in zip(t.qubits, sb):
                        bb[q] = ch
                    H[a, int("".join(bb), 2)] += loc[sub_a, sub_b]
        return H

    def to_json(self) -> dict:
        return {"n": self.n, "terms": [t.to_json() for t in self.terms]}

    @classmethod
    def from_json(cls, obj: dict) -> "StoquasticSAT":
        try:
            n = int(obj["n"])
            terms = []
            for t in obj["terms"]:
                if t["type"] == "basis":
                    terms.append(Projector.basis(t["qubits"], t["x"]))
                elif t["type"] == "diff":
                    terms.append(Projector.diff(t["qubits"], t["x"], t["y"]))
                else:
                    raise SATError(f"unknown term type {t['type']!r}")
        except (KeyError, TypeError) as e:
            raise SATError(f"malformed SAT instance: {e}") from None
        return cls(n, tuple(terms))


@dataclass(frozen=True)
class CircuitLayout:
    """Qubit indices of a compiled circuit: witnesses, ancillas, then clock."""

    witnesses: tuple[int, ...]
    ancillas: tuple[int, ...]
    clock: tuple[int, ...]
    output: int


def _toffoli(gate) -> tuple[int, int, int]:
    g = tuple(gate)
    if len(g) == 4 and g[0] == "toffoli":
        g = g[1:]
    if len(g) != 3 or not all(isinstance(q, (int, np.integer)) for q in g):
        raise SATError(f"only Toffoli gates are supported, got {gate!r}")
    if len(set(g)) != 3:
        raise SATError(f"Toffoli gate needs three distinct qubits, got {gate!r}")
    return tuple(int(q) for q in g)


def circuit_to_sat(gates, witness_count: int, ancilla_inits: str,
                   output: int = 0) -> tuple[StoquasticSAT, CircuitLayout]:
    """Clock construction for a Toffoli circuit as basis and difference terms.

    Data qubits are numbered witnesses first, then ancillas, and gates and
    ``output`` refer to that numbering.  A unary clock of len(gates)+1 qubits
    follows; the clock is valid on 1..10..0 patterns and time t has the first
    t+1 clock bits set.  Ancilla inits are characters of "01+".
    """
    gates = [_toffoli(g) for g in gates]
    nd = witness_count + len(ancilla_inits)
    if witness_count < 0 or nd < 1:
        raise SATError("need at least one data qubit")
    if any(ch not in "01+" for ch in ancilla_inits):
        raise SATError(f"ancilla inits must be drawn from '01+', got {ancilla_inits!r}")
    for g in gates:
        if max(g) >= nd:
            raise SATError(f"gate {g} exceeds {nd} data qubits")
    if not 0 <= output < nd:
        raise SATError(f"output qubit {output} out of range")
    L = len(gates)
    cl = tuple(range(nd, nd + L + 1))
    layout = CircuitLayout(tuple(range(witness_count)), tuple(range(witness_count, nd)), cl, output)
    terms: list[Projector] = [Projector.basis([cl[0]], "0")]
    for l in range(1, L + 1):
        terms.append(Projector.basis([cl[l - 1], cl[l]], "01"))
    # time zero is Cl(0)=1 and, when it exists, Cl(1)=0
    t0q, t0 = (cl[:2], "10") if L else (cl[:1], "1")
    for a, init in zip(layout.ancillas, ancilla_inits):
        q = (a, *t0q)
        if init == "0":
            terms.append(Projector.basis(q, "1" + t0))
        elif init == "1":
            terms.append(Projector.basis(q, "0" + t0))
        else:
            terms.append(Projector.diff(q, "0" + t0, "1" + t0))
    for j, (c1, c2, t) in enumerate(gates, start=1):
        pre = [cl[j - 1]]
        post = [cl[j + 1]] if j < L else []
        tail = "0" * len(post)
        for x, y in (("1110", "0111"), ("1111", "0110")):
            terms.append(Projector.diff([*pre, cl[j], c1, c2, t, *post],
                                        "1" + x + tail, "1" + y + tail))
        for x, y in (("100", "000"), ("101", "001"), ("110", "010")):
            terms.append(Projector.diff([*pre, cl[j], c1, c2, *post],
                                        "1" + x + tail, "1" + y + tail))
    terms.append(Projector.basis([output, cl[L]], "01"))
    return StoquasticSAT(nd + L + 1, tuple(terms)), layout
