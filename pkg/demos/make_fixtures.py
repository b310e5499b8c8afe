"""Write the small fixtures and SAT instances as JSON files for the CLI.

    python3 demos/make_fixtures.py OUTDIR
"""

import sys
from pathlib import Path

from cliquehom import io
from cliquehom.fixtures import (annulus_merge_split, annulus_split_merge, broken_annulus,
                                filled_disc, hollow_square)
from cliquehom.sat import Projector, StoquasticSAT

FIXTURES = {
    "merge_split": annulus_merge_split,
    "split_merge": annulus_split_merge,
    "square": hollow_square,
    "disc": filled_disc,
    "broken": broken_annulus,
}

SATS = {
    "yes_diff": StoquasticSAT(1, (Projector.diff([0], "0", "1"),)),
    "no_basis": StoquasticSAT(1, (Projector.basis([0], "0"), Projector.basis([0], "1"))),
    "yes_pair": StoquasticSAT(2, (Projector.diff([0, 1], "00", "11"), Projector.basis([1], "1"))),
}


def main(out: Path):
    out.mkdir(parents=True, exist_ok=True)
    for name, make in FIXTURES.items():
        f = make()
        io.write_json(out / f"{name}.complex.json", io.complex_to_json(f.X))
        io.write_json(out / f"{name}.filtration.json", io.filtration_to_json(f.F))
    for name, sat in SATS.items():
        io.write_json(out / f"{name}.sat.json", sat.to_json())
    print(f"wrote {2 * len(FIXTURES) + len(SATS)} files to {out}")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "fixtures"))
