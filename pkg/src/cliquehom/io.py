"""JSON file formats for complexes, filtrations, chains and SAT instances.

Every reader raises FormatError with a location string (file and JSON path)
so the CLI can report malformed input precisely.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .complex import ChainVector, ComplexError, CliqueComplex, WeightedGraph, canonicalize
from .filtration import Filtration, FiltrationError
from .sat import SATError, StoquasticSAT


class FormatError(ValueError):
    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def file_hash(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise FormatError(str(path), e.strerror or str(e)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None


def write_json(path: str | Path, obj):
    Path(path).write_text(dumps(obj))


def _field(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(where, f"missing field {key!r}")
    return obj[key]


def _list(obj, where) -> list:
    if not isinstance(obj, list):
        raise FormatError(where, "expected a list")
    return obj


def _int(v, where) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise FormatError(where, f"expected an integer, got {v!r}")
    return v


def _num(v, where) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FormatError(where, f"expected a number, got {v!r}")
    return float(v)


def _simplex(v, where) -> list[int]:
    return [_int(x, f"{where}[{i}]") for i, x in enumerate(_list(v, where))]


# complexes ---------------------------------------------------------------

def complex_to_json(X: CliqueComplex) -> dict:
    G = X.graph
    verts = []
    for v in sorted(G.weights):
        e = {"id": v, "weight": G.weights[v]}
        if v in G.labels:
            e["label"] = G.labels[v]
        verts.append(e)
    orient = [{"simplex": list(vs), "sign": s} for vs, s in sorted(X.orientation_map().items())]
    return {"vertices": verts, "edges": [list(e) for e in sorted(G.edges)],
            "dmax": X.dmax, "orientation": orient}


def complex_from_json(obj, where: str = "complex") -> CliqueComplex:
    weights, labels = {}, {}
    for i, v in enumerate(_list(_field(obj, "vertices", where), f"{where}.vertices")):
        loc = f"{where}.vertices[{i}]"
        vid = _int(_field(v, "id", loc), f"{loc}.id")
        if vid in weights:
            raise FormatError(f"{loc}.id", f"duplicate vertex id {vid}")
        weights[vid] = _num(_field(v, "weight", loc), f"{loc}.weight")
        if "label" in v:
            labels[vid] = str(v["label"])
    edges = []
    for i, e in enumerate(_list(_field(obj, "edges", where), f"{where}.edges")):
        uv = _simplex(e, f"{where}.edges[{i}]")
        if len(uv) != 2:
            raise FormatError(f"{where}.edges[{i}]", "an edge has two endpoints")
        edges.append(tuple(uv))
    dmax = _int(_field(obj, "dmax", where), f"{where}.dmax")
    try:
        X = CliqueComplex(WeightedGraph.build(weights, edges, labels), dmax)
    except ComplexError as e:
        raise FormatError(where, str(e)) from None
    for i, o in enumerate(_list(obj.get("orientation", []), f"{where}.orientation")):
        loc = f"{where}.orientation[{i}]"
        vs = _simplex(_field(o, "simplex", loc), f"{loc}.simplex")
        s = _int(_field(o, "sign", loc), f"{loc}.sign")
        try:
            srt, parity = canonicalize(vs)
            X.set_sign(srt.vertices, s * parity)
        except ComplexError as e:
            raise FormatError(loc, str(e)) from None
    return X


# filtrations -------------------------------------------------------------

def filtration_to_json(F: Filtration) -> dict:
    out = {"dim": F.dim, "N": F.N,
           "levels": [{"simplex": list(k), "level": lv} for k, lv in sorted(F.levels.items())]}
    if F.layer_weights:
        out["layer_weights"] = {str(k): w for k, w in sorted(F.layer_weights.items())}
    return out


def filtration_from_json(obj, where: str = "filtration") -> Filtration:
    dim = _int(_field(obj, "dim", where), f"{where}.dim")
    N = obj.get("N")
    if N is not None:
        N = _int(N, f"{where}.N")
    levels = {}
    for i, e in enumerate(_list(_field(obj, "levels", where), f"{where}.levels")):
        loc = f"{where}.levels[{i}]"
        vs = tuple(sorted(_simplex(_field(e, "simplex", loc), f"{loc}.simplex")))
        if vs in levels:
            raise FormatError(loc, f"simplex {list(vs)} listed twice")
        levels[vs] = _int(_field(e, "level", loc), f"{loc}.level")
    lw = None
    if "layer_weights" in obj:
        raw = obj["layer_weights"]
        if not isinstance(raw, dict):
            raise FormatError(f"{where}.layer_weights", "expected an object")
        lw = {}
        for k, w in raw.items():
            try:
                lw[int(k)] = _num(w, f"{where}.layer_weights.{k}")
            except ValueError:
                raise FormatError(f"{where}.layer_weights", f"level key {k!r} is not an integer") from None
    try:
        return Filtration(dim, levels, N, lw)
    except FiltrationError as e:
        raise FormatError(where, str(e)) from None


def check_compatible(X: CliqueComplex, F: Filtration, where: str = "filtration"):
    for vs in F.levels:
        if vs not in X:
            raise FormatError(where, f"{list(vs)} is not a simplex of the complex")


# chains and SAT instances ------------------------------------------------

def chain_to_json(c: ChainVector, X: CliqueComplex | None = None) -> dict:
    """Coefficients are written against the sorted vertex order of each simplex."""
    def sgn(k):
        return X.sign(k) if X is not None and c.dim > 0 else 1
    return {"dim": c.dim,
            "entries": [{"simplex": list(k), "coeff": v * sgn(k)} for k, v in sorted(c.entries.items())]}


def chain_from_json(obj, X: CliqueComplex | None = None, where: str = "chain") -> ChainVector:
    """Read a chain; the listed vertex order of each simplex sets its sign.

    With a complex, coefficients are converted to its chosen orientations.
    """
    dim = _int(_field(obj, "dim", where), f"{where}.dim")
    out = ChainVector(dim)
    for i, e in enumerate(_list(_field(obj, "entries", where), f"{where}.entries")):
        loc = f"{where}.entries[{i}]"
        vs = _simplex(_field(e, "simplex", loc), f"{loc}.simplex")
        c = _num(_field(e, "coeff", loc), f"{loc}.coeff")
        if len(vs) != dim + 1:
            raise FormatError(loc, f"simplex has dimension {len(vs) - 1}, chain has {dim}")
        try:
            s, parity = canonicalize(vs)
        except ComplexError as e:
            raise FormatError(loc, str(e)) from None
        if X is not None and s.vertices not in X:
            raise FormatError(loc, f"{vs} is not a simplex of the complex")
        k = s.vertices
        if X is not None and dim > 0:
            parity *= X.sign(k)
        out.entries[k] = out.entries.get(k, 0.0) + parity * c
    return out


def sat_from_json(obj, where: str = "sat") -> StoquasticSAT:
    try:
        return StoquasticSAT.from_json(obj)
    except SATError as e:
        raise FormatError(where, str(e)) from None
