#!/usr/bin/env python3
"""How the subsequence regression depends on the scale window and truncation.

Prints regression_D_I for (a) the window grown at its coarse end, (b) the
window grown at its fine end, and (c) increasing truncation levels.
"""
import argparse

import numpy as np

from hydrodim.spectra import Hydrogen, PowerLaw
from hydrodim.states import power_state
from hydrodim.dimensions import subsequence_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", choices=["hydrogen", "powerlaw"], default="hydrogen")
    ap.add_argument("--j", type=int, default=10)
    ap.add_argument("--q", type=float, default=0.5)
    ap.add_argument("--max-log2", type=int, default=21,
                    help="largest truncation 2^k tried in part (c)")
    args = ap.parse_args()
    fam = Hydrogen() if args.family == "hydrogen" else PowerLaw(alpha=1.0)
    levels = [2**k for k in range(10, 19)]

    res = subsequence_scan(power_state(args.j, 2**19), fam, args.q, levels)
    print("coarse end grown (first level, D_I):")
    for k in range(len(levels) - 2, -1, -1):
        m = np.zeros(len(levels), bool)
        m[k:] = True
        print(f"  {levels[k]:>7d}  {res.regression_D('I', m):.4f}")
    print("fine end grown (last level, D_I):")
    for k in range(2, len(levels) + 1):
        m = np.zeros(len(levels), bool)
        m[:k] = True
        print(f"  {levels[k - 1]:>7d}  {res.regression_D('I', m):.4f}")
    print("truncation (n_max, D_I, D_L):")
    for e in range(19, args.max_log2 + 1):
        r = subsequence_scan(power_state(args.j, 2**e), fam, args.q, levels)
        print(f"  2^{e}  {r.regression_D('I'):.4f}  {r.regression_D('L'):.4f}", flush=True)


if __name__ == "__main__":
    main()
