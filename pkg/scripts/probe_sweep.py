"""Ramification probe over every chamber witness of the chosen classes.

Prints one line per chamber: lacuna flag, verdict, obstructing generator,
coupling and |cap period|; ends with a tally per class.
Usage: python3 scripts/probe_sweep.py [--classes B4+ C3- F4+ ...] [--seed N]
"""

import argparse
from collections import Counter

from boundary_lacunas.atlas import census
from boundary_lacunas.families import parse_class


def _parse(label: str):
    sign = label[-1]
    if label.upper().startswith("F4"):
        return parse_class("F4", None, sign)
    return parse_class(label[0], int(label[1:-1]), sign)


def main() -> None:
    from boundary_lacunas.volume import ramification_probe

    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--classes", nargs="+", default=["B2+", "B3-", "B4+", "C3+", "C4-", "F4+", "F4-"])
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    for label in args.classes:
        cls = _parse(label)
        tally = Counter()
        for rec in census(cls, seed=args.seed).records:
            rep = ramification_probe(cls, rec.witness)
            tally[(rec.is_lacuna, rep.verdict)] += 1
            ob = rep.obstruction
            extra = ""
            if ob is not None and ob.obstructed:
                extra = f"gamma_{ob.generator} coupling {ob.coupling:+d} |period| {abs(rep.period):.4g}"
            print(f"{cls.label:6} {'lacuna' if rec.is_lacuna else '      '} {str(rec.signature):28} "
                  f"{rep.verdict:24} {extra}")
        print(f"{cls.label}: " + ", ".join(f"{'lacuna' if k[0] else 'non-lacuna'} {k[1]}: {v}"
                                          for k, v in sorted(tally.items())))


if __name__ == "__main__":
    main()
