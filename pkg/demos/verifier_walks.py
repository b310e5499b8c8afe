"""Run the random-walk verifier on YES and NO fixtures.

YES instances use the honest witness and a fixed epsilon.  NO instances use
epsilon equal to the smallest Laplacian eigenvalue and the witness with the
largest exact acceptance among the essential simplices.
"""

import numpy as np

from cliquehom.fixtures import annulus_merge_split, annulus_split_merge, broken_annulus, filled_disc
from cliquehom.gadgets import combine
from cliquehom.operators import laplacian
from cliquehom.sat import Projector, StoquasticSAT
from cliquehom.walk import VerifierParams, exact_acceptance, honest_witness, prepare, run_many

RUNS = 2000


def report(name, proto):
    acc = run_many(proto, range(RUNS))
    print(f"{name:28s} L={proto.L:>9d} exact={exact_acceptance(proto):.6f} "
          f"sampled={acc.mean():.4f} ({RUNS} runs)")


def main():
    print("YES instances")
    yes = [("merge-split annulus", annulus_merge_split()), ("split-merge annulus", annulus_split_merge()),
           ("gadget Diff(0,1)", combine(StoquasticSAT(1, (Projector.diff([0], "0", "1"),)), 0.1))]
    for name, f in yes:
        report(name, prepare(f.X, f.F, honest_witness(f.X, f.F), VerifierParams(0.05)))

    print("NO instances")
    no = [("filled disc", filled_disc()), ("broken annulus", broken_annulus()),
          ("gadget Basis(0)+Basis(1)",
           combine(StoquasticSAT(1, (Projector.basis([0], "0"), Projector.basis([0], "1"))), 0.1))]
    for name, f in no:
        eps = float(np.linalg.eigvalsh(laplacian(f.X, 1).dense())[0])
        A = f.F.analysis(f.X)
        protos = [prepare(f.X, f.F, A.vertices(int(j)), VerifierParams(eps))
                  for j in np.flatnonzero(A.essential)]
        report(name, max(protos, key=exact_acceptance))


if __name__ == "__main__":
    main()
