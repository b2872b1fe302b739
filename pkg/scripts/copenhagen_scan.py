#!/usr/bin/env python3
"""Scan det U_W over the regularized Copenhagen Hill region and save the per-point minimum."""

import argparse

import numpy as np

from cr3bp.convexity import convexity_scan, copenhagen_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, nargs="+", default=[-2.0, -2.5, -3.0])
    ap.add_argument("--res", type=int, default=400)
    ap.add_argument("--theta-res", type=int, default=64)
    ap.add_argument("--out", default=None, help="CSV prefix; one file per energy")
    args = ap.parse_args()

    for h in args.h:
        s = convexity_scan(copenhagen_model(h), args.res, args.res, args.theta_res)
        x1, x2, th = s.argmin
        line = f"h={h:+.3f}  min det U_W = {s.minimum:.6e} at (x1, x2, theta) = ({x1:.4f}, {x2:.4f}, {th:.4f})"
        if s.vanishing_order is not None:
            line += f"  vanishing order {s.vanishing_order:.3f}"
        print(line)
        if args.out:
            np.savetxt(f"{args.out}_h{h:+.3f}.csv", s.rows(), delimiter=",", fmt="%.17g",
                       header="x1,x2,theta_min,det_min", comments="")


if __name__ == "__main__":
    main()
