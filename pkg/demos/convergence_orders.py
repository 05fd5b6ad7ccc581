#!/usr/bin/env python3
"""Measure the observed sup-norm convergence order on the explicit solution.

Runs the solver against the closed-form radial profile on a shrinking
family of grids, prints one row per grid level, and reports the slope of
the log-log error fit. Degenerate diffusion is slower than the classical
heat equation, so expect orders well below 2 that decrease as p grows.

Usage:
    python demos/convergence_orders.py
    python demos/convergence_orders.py --p 3 --p 4 --levels 4 --plot orders.png
"""

import argparse
import sys

from plapfd import convergence_study, observed_order


def run(p, hs, T):
    rows = convergence_study(p, hs, T=T)
    print(f"p = {p}")
    print(f"  {'h':>8} {'r':>8} {'tau':>12} {'sup error':>12} {'seconds':>8}")
    for row in rows:
        print(
            f"  {row.h:8.4f} {row.r:8.4f} {row.tau:12.3e}"
            f" {row.sup_error:12.5e} {row.runtime_seconds:8.2f}"
        )
    order = observed_order(rows)
    print(f"  observed order: {order:.4f}")
    return rows, order


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", action="append", type=float, default=None,
                    help="diffusion exponent, repeatable (default: 3 and 4)")
    ap.add_argument("--levels", type=int, default=3,
                    help="number of grid refinements starting at h=0.08")
    ap.add_argument("--T", type=float, default=0.5, help="time horizon")
    ap.add_argument("--plot", metavar="PNG", default=None,
                    help="write a log-log error plot (needs matplotlib)")
    args = ap.parse_args(argv)

    ps = args.p if args.p else [3.0, 4.0]
    hs = [0.08 / 2**k for k in range(args.levels)]

    results = {}
    for p in ps:
        results[p] = run(p, hs, args.T)

    if args.plot:
        try:
            import matplotlib
            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not installed, skipping plot", file=sys.stderr)
            return 0
        fig, ax = plt.subplots()
        for p, (rows, order) in results.items():
            ax.loglog([r.h for r in rows], [r.sup_error for r in rows],
                      "o-", label=f"p={p:g} (order {order:.2f})")
        ax.set_xlabel("h")
        ax.set_ylabel("sup error at T")
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        fig.savefig(args.plot, dpi=150, bbox_inches="tight")
        print(f"wrote {args.plot}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
