"""B2+ with an oval off S: the volume function is algebraic.

For f = (x - a)^2 + y^2 - r^2 the S-avoiding region {f <= c} is a disk and
V(c) = 2 pi (a - sqrt(a^2 - r^2 - c)).  The only loop that moves V is the
one around the tangency value c = a^2 - r^2, where the square root changes
sign: an order-two reflection, so no transvection grows V.  This script
compares the quadrature with the closed form and runs the ramification probe.

Usage: python3 scripts/b2_algebraic_volume.py [--a A] [--r R]
"""

import argparse
import math
from fractions import Fraction

import numpy as np

from boundary_lacunas.families import Deformation, parse_class
from boundary_lacunas.monodromy import eta_matrix
from boundary_lacunas.volume import ramification_probe, volume_series


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--a", type=Fraction, default=Fraction(2))
    ap.add_argument("--r", type=Fraction, default=Fraction(1))
    args = ap.parse_args()

    cls = parse_class("B", 2, "+")
    lam = Deformation([args.a**2 - args.r**2, -2 * args.a])
    a, r = float(args.a), float(args.r)
    top = a * a - r * r
    cs = np.linspace(-r * r + 1e-3, top - 1e-3, 9)
    series = volume_series(cls, lam, cs)
    print(f"{'c':>10} {'V quadrature':>18} {'V closed form':>18} {'dV/dc':>14} {'pi/sqrt(.)':>14}")
    for c, v, d in zip(series.c, series.values, series.derivatives):
        exact = 2 * math.pi * (a - math.sqrt(top - c))
        print(f"{c:10.4f} {v:18.12f} {exact:18.12f} {d:14.8f} {math.pi / math.sqrt(top - c):14.8f}")
    print("eta(B2) =", eta_matrix(cls).eta)
    rep = ramification_probe(cls, lam)
    print("probe:", rep.verdict, "-", rep.reason)


if __name__ == "__main__":
    main()
