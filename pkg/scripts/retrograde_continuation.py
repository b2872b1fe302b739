#!/usr/bin/env python3
"""Continue the retrograde orbit around the first primary in the energy."""

import argparse
import warnings

import numpy as np

from cr3bp.index import orbit_index
from cr3bp.orbits import find_retrograde, symmetry_defect


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=0.5)
    ap.add_argument("--start", type=float, default=-2.2)
    ap.add_argument("--stop", type=float, default=-2.05)
    ap.add_argument("--step", type=float, default=0.025)
    ap.add_argument("--index", action="store_true", help="also compute the double-cover index")
    args = ap.parse_args()
    warnings.simplefilter("ignore")

    o = find_retrograde(args.mu, args.start, with_monodromy=args.index)
    guess = (o.meta["q1_left"], o.meta["q1_right"])
    n = int(round(abs(args.stop - args.start) / args.step))
    print(f"{'E':>8} {'period':>14} {'action':>14} {'closure':>10} {'symmetry':>10}")
    for E in np.linspace(args.start, args.stop, n + 1):
        if E != args.start:
            o = find_retrograde(args.mu, float(E), guess=guess, with_monodromy=False)
            guess = (o.meta["q1_left"], o.meta["q1_right"])
        print(f"{E:8.3f} {o.period:14.10f} {o.action:14.10f} {o.closure_residual:10.2e} {symmetry_defect(o):10.2e}")
    if args.index:
        o = find_retrograde(args.mu, args.start)
        print("double-cover index:", orbit_index(o, cover=2))


if __name__ == "__main__":
    main()
