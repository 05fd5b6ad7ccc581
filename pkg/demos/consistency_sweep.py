#!/usr/bin/env python3
# Tabulate the nonlocal operator's truncation error on |x|^2 as the stencil
# radius shrinks. Away from the origin the error decays with r; in 1D with
# power-of-two radii the p=3 column is exactly zero off the origin because
# the stencil sums telescope in floating point.
#
# Usage:
#   python demos/consistency_sweep.py
#   python demos/consistency_sweep.py --p 4 --d 2 --levels 0.4 0.2 0.1
import argparse
import sys

from plapfd import consistency_table


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=float, default=3.0)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--levels", type=float, nargs="+",
                    default=[0.5, 0.25, 0.125, 0.0625])
    ap.add_argument("--window", type=float, default=1.0,
                    help="half-width of the off-origin report window")
    args = ap.parse_args(argv)

    rows = consistency_table(args.p, args.d, args.levels, window=args.window)
    print(f"p={args.p:g}  d={args.d}")
    print(f"{'r':>9} {'h':>9} {'stencil':>8} {'max error':>12} {'off origin':>12}")
    for row in rows:
        print(f"{row.r:9.5f} {row.h:9.5f} {row.stencil_size:8d}"
              f" {row.max_error:12.5e} {row.max_error_off_origin:12.5e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
