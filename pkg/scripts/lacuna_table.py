"""Chamber and lacuna counts for B_k, C_k (k = 2..7) and F4, next to the expected table.

Also prints the stabilized lacuna counts for k <= 5.
Usage: python3 scripts/lacuna_table.py [--seed N] [--kmax K]
"""

import argparse
import time

from boundary_lacunas.atlas import census, stabilized_census
from boundary_lacunas.families import parse_class

STABS = [(1, 0), (0, 1), (1, 1), (2, 0)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--kmax", type=int, default=7)
    args = ap.parse_args()

    classes = [parse_class(f, k, s) for f in "BC" for k in range(2, args.kmax + 1) for s in "+-"]
    classes += [parse_class("F4", None, s) for s in "+-"]
    print(f"{'class':8} {'comps':>11} {'lacunas':>11}   stabilized lacunas " + " ".join(f"{r},{s}" for r, s in STABS))
    t0 = time.perf_counter()
    for cls in classes:
        res = census(cls, seed=args.seed)
        row = (f"{cls.label:8} {res.component_count:>4} / {res.expected_components:<4} "
               f"{res.lacuna_count:>4} / {res.expected_lacunas:<4}")
        if cls.family.value == "F4" or cls.k <= 5:
            stab = [stabilized_census(cls.with_stab(*rs), res.records) for rs in STABS]
            row += "   " + "  ".join(f"{s.lacuna_count}/{s.expected_lacunas}" for s in stab)
        print(row + ("" if res.matches_expected else "   MISMATCH"))
    print(f"total {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
