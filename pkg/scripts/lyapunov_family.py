#!/usr/bin/env python3
"""Planar Lyapunov orbits near l1: period, Floquet multipliers and index against eps."""

import argparse

import numpy as np

from cr3bp.index import orbit_index
from cr3bp.orbits import lyapunov_orbit, transverse_multipliers
from cr3bp.saddle_center import saddle_center_data


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, default=0.5)
    ap.add_argument("--eps", type=float, nargs="+", default=[1e-4, 3e-4, 1e-3, 3e-3, 1e-2])
    args = ap.parse_args()

    s = saddle_center_data(args.mu)
    T0 = 2 * np.pi / s.lambda2
    print(f"linear period 2 pi / lambda2 = {T0:.12f}")
    print(f"{'eps':>8} {'period':>16} {'(T - T0)/eps':>14} {'multiplier':>14} {'index':>6}")
    for eps in args.eps:
        o = lyapunov_orbit(args.mu, eps)
        m = np.max(np.abs(transverse_multipliers(o)))
        k = orbit_index(o, trivialization="cartesian")
        print(f"{eps:8.1e} {o.period:16.12f} {(o.period - T0) / eps:14.6f} {m:14.6e} {k:6d}")


if __name__ == "__main__":
    main()
