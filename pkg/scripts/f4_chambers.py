"""The eight chambers of the F4 complement: signature, lacuna flag, witness and population.

Usage: python3 scripts/f4_chambers.py [--sign +|-] [--budget N] [--seed N]
"""

import argparse

from boundary_lacunas.atlas import census
from boundary_lacunas.curvetopo import topology
from boundary_lacunas.families import parse_class


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sign", default="+", choices=["+", "-"])
    ap.add_argument("--budget", type=int, default=None)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    cls = parse_class("F4", None, args.sign)
    res = census(cls, args.budget, args.seed)
    print(f"{cls.label}: {res.component_count} chambers ({res.expected_components} expected), "
          f"{res.lacuna_count} lacunas ({res.expected_lacunas} expected), {res.samples} samples, {res.status}")
    for rec in sorted(res.records, key=lambda r: -r.population):
        topo = topology(cls, rec.witness)
        kinds = ", ".join(("oval" if c.compact else "arc") + ("|S" if c.meets_S else "") for c in topo.components)
        print(f"  {'LACUNA' if rec.is_lacuna else '      '} pop={rec.population:>6}  {rec.signature}  "
              f"[{kinds or 'empty'}]  lam=({', '.join(rec.witness.to_json())})")
    for line in res.diagnostics:
        print("  note:", line)


if __name__ == "__main__":
    main()
