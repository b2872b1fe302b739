#!/usr/bin/env python3
"""Interpolation constants near l1 and transversality of the interpolated Liouville field."""

import argparse

import numpy as np

from cr3bp.liouville import interpolation_data, verify_y_eps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=0.5)
    ap.add_argument("--eps", type=float, nargs="+", default=[1e-3])
    ap.add_argument("--res", type=int, default=340)
    args = ap.parse_args()

    for eps in args.eps:
        d = interpolation_data(args.mu, eps)
        print(f"eps={eps:.1e}  d={np.round(d.d, 6).tolist()}")
        print(f"  hat_c={d.hat_c:.6f}  check_c={d.check_c:.6f}  N={d.N:.4f}  cutoff outer={d.beta.outer:.4f}")
        r = verify_y_eps(args.mu, eps, n_grid=args.res, data=d)
        print(f"  samples: neck {r.n_neck}, elsewhere {r.n_full}")
        print(f"  min dH.Y = {r.min_margin:.4e} (neck {r.neck_min:.4e}, elsewhere {r.full_min:.4e})")
        print(f"  neck reach {r.max_neck_distance:.3f} eps^1/2, max |x3| {r.max_neck_x3:.3f}")
        print(f"  cutoff derivative slack min {r.beta_slack_min:.4f} at x3 = {r.beta_slack_worst_x3:.4f}")


if __name__ == "__main__":
    main()
