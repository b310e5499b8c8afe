"""Low spectrum of the single-qubit gluing and filling gadgets against lambda.

The first excited level falls like lambda^6 and the next band like lambda^2;
the fitted log-log slopes are printed under each table.
"""

import numpy as np

from cliquehom.gadgets import filling_gadget, gluing_gadget
from cliquehom.operators import laplacian

LAMBDAS = [0.30, 0.22, 0.16, 0.12]


def main():
    for name, make in [("gluing |0>-|1>", lambda lam: gluing_gadget("0", "1", lam)),
                       ("filling |0><0|", lambda lam: filling_gadget("0", lam))]:
        print(name)
        rows = []
        for lam in LAMBDAS:
            g = make(lam)
            w = np.linalg.eigvalsh(laplacian(g.X, 1).dense())
            rows.append(w[:3])
            print(f"  lambda={lam:.2f}  e0={w[0]:+.2e}  e1={w[1]:.3e}  e2={w[2]:.3e}")
        rows = np.array(rows)
        x = np.log(LAMBDAS)
        s1 = np.polyfit(x, np.log(rows[:, 1]), 1)[0]
        s2 = np.polyfit(x, np.log(rows[:, 2]), 1)[0]
        print(f"  slopes: first excited {s1:.2f}, next band {s2:.2f}")


if __name__ == "__main__":
    main()
