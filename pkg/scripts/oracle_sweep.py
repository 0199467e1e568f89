#!/usr/bin/env python3
"""Sweep both matrix-inequality oracles over the built-in speed catalog and
print the worst observed (tolerance-scaled) values per speed and dimension.
A negative control (power:-2) is included to show what failure looks like.

Example:
    python scripts/oracle_sweep.py --trials 2000 --dims 2 3
"""
import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from noncollapse.oracle import (boundary_suite, counterexample_search,  # noqa: E402
                                interior_suite)
from noncollapse.speeds import parse_speed  # noqa: E402

CATALOG = ["mean", "harmonic", "sigma-ratio:2", "sigma-root:2", "power:-1", "power:0.5"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'speed':<14}{'n':>3}  {'interior min/tol':>18}  {'boundary min/tol':>18}")
    for spec in CATALOG:
        for n in args.dims:
            if spec.startswith("sigma") and int(spec.split(":")[1]) > n:
                continue
            f = parse_speed(spec, n)
            ri = interior_suite(f, trials=args.trials, seed=args.seed)
            rb = boundary_suite(f, trials=args.trials, seed=args.seed)
            print(f"{spec:<14}{n:>3}  {ri['min_scaled']:>18.4g}  {rb['min_scaled']:>18.4g}")

    witness = counterexample_search(parse_speed("power:-2", 2),
                                    trials=args.trials * 10, seed=args.seed)
    if witness:
        print(f"\nnegative control power:-2: gap {witness['gap']:.4g} "
              f"at trial {witness['trial']} (k={witness['k']:.3f})")
    else:
        print("\nnegative control power:-2: no violation found (increase --trials)")


if __name__ == "__main__":
    main()
