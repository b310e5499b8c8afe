"""Command-line front end.

Exit codes: 0 success or Accept, 1 Reject or failed validation, 2 usage or
input error.  Reports are canonical JSON on stdout (or --out FILE); they
carry input hashes and every parameter, and no timestamps, so identical
inputs and seeds give byte-identical reports.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .complex import ComplexError, TooLargeError
from .filtration import StructuralError, validate_orientable, validate_uniform
from .gadgets import DEFAULT_LAMBDA, ConstructionError, combine, qubit_complex
from .operators import OperatorError, kernel_dim, laplacian, low_spectrum, zero_threshold
from .oracle import betti_numbers, is_boundary, is_cycle
from .sat import SATError
from .walk import VerifierParams, WalkError, honest_witness, prepare, run_many, walk

ACCEPT_THRESHOLD = 2 / 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _report(cmd: str, inputs: dict[str, str], params: dict, output) -> dict:
    return {"subcommand": cmd,
            "inputs": {k: {"path": v, "sha256": io.file_hash(v)} for k, v in sorted(inputs.items())},
            "parameters": params, "output": output}


def _load_complex(path):
    return io.complex_from_json(io.load_json(path), where=str(path))


def _load_pair(args):
    X = _load_complex(args.complex)
    F = io.filtration_from_json(io.load_json(args.filtration), where=str(args.filtration))
    io.check_compatible(X, F, str(args.filtration))
    if getattr(args, "dim", None) is not None and args.dim != F.dim:
        raise UsageError(f"--dim {args.dim} does not match the filtration dimension {F.dim}")
    return X, F


def _witness(text: str | None):
    if text is None:
        return None
    try:
        return tuple(sorted(int(v) for v in text.split(",")))
    except ValueError:
        raise UsageError(f"--witness must be comma-separated vertex ids, got {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _f_table_json(table) -> dict:
    return {f"{i},{j}": v for (i, j), v in sorted(table.items())}


# subcommands ---------------------------------------------------------------

def cmd_check_filtration(args):
    X, F = _load_pair(args)
    viol = validate_orientable(X, F)
    uni = validate_uniform(X, F)
    out = {"orientable": not viol, "uniform": uni.ok,
           "violations": [v.to_json() for v in viol + uni.violations],
           "f_table": _f_table_json(uni.f_table)}
    rep = _report("check-filtration", {"complex": args.complex, "filtration": args.filtration}, {}, out)
    return rep, 0 if (not viol and uni.ok) else 1


def cmd_spectrum(args):
    X = _load_complex(args.complex)
    op = laplacian(X, args.dim, args.kind)
    vals = low_spectrum(op, args.k, args.tol)
    params = {"dim": args.dim, "kind": args.kind, "k": args.k, "tol": args.tol}
    return _report("spectrum", {"complex": args.complex}, params,
                   {"eigenvalues": [float(v) for v in vals]}), 0


def cmd_betti(args):
    X = _load_complex(args.complex)
    top = args.max_dim if args.max_dim is not None else max(X.dmax - 1, 0)
    dims = [kernel_dim(laplacian(X, d)) for d in range(top + 1)]
    return _report("betti", {"complex": args.complex}, {"max_dim": top},
                   {"betti": dims, "method": "laplacian kernel"}), 0


def cmd_verify(args):
    X, F = _load_pair(args)
    w = _witness(args.witness)
    if w is None:
        w = honest_witness(X, F)
    if args.eps is None and args.steps is None:
        raise UsageError("verify needs --eps or --steps")
    if args.eps is not None and args.eps <= 0:
        raise UsageError("--eps must be positive")
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    proto = prepare(X, F, w, VerifierParams(args.eps or 1.0, args.beta, args.steps, args.seed))
    seeds = list(range(args.seed, args.seed + args.runs))
    acc = run_many(proto, seeds)
    rate = float(acc.mean())
    out = {"accept_rate": rate, "accepted": int(acc.sum()), "runs": args.runs,
           "L": int(proto.L), "beta": float(proto.beta), "witness": list(w)}
    if args.trace:
        out["traces"] = [dict(walk(proto, s).to_json(), seed=s) for s in seeds]
    params = {"dim": F.dim, "eps": args.eps, "beta": args.beta, "steps": args.steps,
              "seed": args.seed, "runs": args.runs, "witness": args.witness}
    rep = _report("verify", {"complex": args.complex, "filtration": args.filtration}, params, out)
    return rep, 0 if rate >= ACCEPT_THRESHOLD else 1


def cmd_walk_trace(args):
    X, F = _load_pair(args)
    w = _witness(args.witness)
    if w is None:
        w = honest_witness(X, F)
    if args.steps < 0:
        raise UsageError("--steps must be non-negative")
    proto = prepare(X, F, w, VerifierParams(1.0, args.beta, args.steps, args.seed))
    tr = walk(proto, args.seed)
    params = {"dim": F.dim, "steps": args.steps, "seed": args.seed, "beta": args.beta,
              "witness": args.witness}
    out = dict(tr.to_json(), L=int(proto.L), beta=float(proto.beta), witness=list(w))
    rep = _report("walk-trace", {"complex": args.complex, "filtration": args.filtration}, params, out)
    return rep, 0 if tr.accepted else 1


def cmd_gadget_qubit_graph(args):
    X, _ = qubit_complex(args.n)
    io.write_json(args.o, io.complex_to_json(X))
    out = {"file": args.o, "vertices": X.count(0), "edges": X.count(1), "dmax": X.dmax}
    return _report("gadget qubit-graph", {}, {"n": args.n}, out), 0


def cmd_gadget_compile(args):
    sat = io.sat_from_json(io.load_json(args.sat), where=str(args.sat))
    g = combine(sat, args.lam)
    d = Path(args.o)
    d.mkdir(parents=True, exist_ok=True)
    io.write_json(d / "complex.json", io.complex_to_json(g.X))
    io.write_json(d / "filtration.json", io.filtration_to_json(g.F))
    out = {"complex": str(d / "complex.json"), "filtration": str(d / "filtration.json"),
           "dim": g.dim, "levels": g.F.N + 1, "vertices": g.X.count(0),
           "simplices": g.X.count(g.dim), "dropped_candidates": len(g.dropped)}
    return _report("gadget compile", {"sat": args.sat}, {"lambda": args.lam}, out), 0


def cmd_gadget_spectrum_report(args):
    sat = io.sat_from_json(io.load_json(args.sat), where=str(args.sat))
    lams = _floats(args.lambdas)
    rows = []
    for lam in lams:
        g = combine(sat, lam)
        op = laplacian(g.X, g.dim)
        vals = low_spectrum(op, args.k)
        cut = zero_threshold(op)
        rows.append({"lambda": lam, "eigenvalues": [float(v) for v in vals],
                     "kernel_dim": int(np.sum(vals < cut))})
    slopes = {}
    if len(lams) >= 2:
        x = np.log(lams)
        for band in range(args.k):
            ys = [r["eigenvalues"][band] for r in rows if band < len(r["eigenvalues"])]
            if len(ys) == len(lams) and min(ys) > 0:
                slopes[str(band)] = float(np.polyfit(x, np.log(ys), 1)[0])
    out = {"rows": rows, "log_log_slopes": slopes}
    return _report("gadget spectrum-report", {"sat": args.sat},
                   {"lambdas": lams, "k": args.k}, out), 0


def cmd_oracle_betti(args):
    X = _load_complex(args.complex)
    b = betti_numbers(X, args.max_dim)
    return _report("oracle betti", {"complex": args.complex}, {"max_dim": args.max_dim},
                   {"betti": b, "method": "rational rank"}), 0


def cmd_oracle_boundary_test(args):
    X = _load_complex(args.complex)
    c = io.chain_from_json(io.load_json(args.chain), X, where=str(args.chain))
    out = {"dim": c.dim, "is_cycle": is_cycle(c, X), "is_boundary": is_boundary(c, X)}
    return _report("oracle boundary-test", {"complex": args.complex, "chain": args.chain}, {}, out), 0


# parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cliquehom", description="Clique-complex homology verification toolkit.")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def pair(sp, dim_required=False):
        sp.add_argument("--complex", required=True)
        sp.add_argument("--filtration", required=True)
        sp.add_argument("--dim", type=int, required=dim_required)

    s = sub.add_parser("check-filtration", help="validate orientability and uniformity")
    pair(s)
    s.set_defaults(func=cmd_check_filtration)

    s = sub.add_parser("spectrum", help="lowest Laplacian eigenvalues")
    s.add_argument("--complex", required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--kind", choices=["up", "down", "full"], default="full")
    s.add_argument("--k", type=int, default=6)
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("betti", help="Betti numbers from Laplacian kernels")
    s.add_argument("--complex", required=True)
    s.add_argument("--max-dim", type=int)
    s.set_defaults(func=cmd_betti)

    s = sub.add_parser("verify", help="run the random-walk verifier")
    pair(s)
    s.add_argument("--eps", type=float)
    s.add_argument("--witness")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--beta", type=float)
    s.add_argument("--steps", type=int)
    s.add_argument("--trace", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("walk-trace", help="one verifier walk with its full trace")
    pair(s)
    s.add_argument("--witness")
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--beta", type=float)
    s.set_defaults(func=cmd_walk_trace)

    g = sub.add_parser("gadget", help="qubit complexes and SAT gadget compilation")
    gs = g.add_subparsers(dest="gcmd", required=True, parser_class=_Parser)
    s = gs.add_parser("qubit-graph")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("-o", required=True)
    s.set_defaults(func=cmd_gadget_qubit_graph)
    s = gs.add_parser("compile")
    s.add_argument("--sat", required=True)
    s.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    s.add_argument("-o", required=True)
    s.set_defaults(func=cmd_gadget_compile)
    s = gs.add_parser("spectrum-report")
    s.add_argument("--sat", required=True)
    s.add_argument("--lambdas", default="0.3,0.22,0.16,0.12")
    s.add_argument("--k", type=int, default=4)
    s.set_defaults(func=cmd_gadget_spectrum_report)

    o = sub.add_parser("oracle", help="brute-force ground truth")
    os_ = o.add_subparsers(dest="ocmd", required=True, parser_class=_Parser)
    s = os_.add_parser("betti")
    s.add_argument("--complex", required=True)
    s.add_argument("--max-dim", type=int)
    s.set_defaults(func=cmd_oracle_betti)
    s = os_.add_parser("boundary-test")
    s.add_argument("--complex", required=True)
    s.add_argument("--chain", required=True)
    s.set_defaults(func=cmd_oracle_boundary_test)
    return p


INPUT_ERRORS = (io.FormatError, ComplexError, SATError, WalkError, ConstructionError,
                TooLargeError, OperatorError, StructuralError, ValueError)


def dispatch(argv: list[str] | None = None) -> tuple[int, dict | None]:
    """Run one subcommand; returns the exit code and the report (None on usage error)."""
    try:
        args = build_parser().parse_args(argv)
        report, code = args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2, None
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2, None
    text = io.dumps(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code, report


def main(argv: list[str] | None = None) -> int:
    return dispatch(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
