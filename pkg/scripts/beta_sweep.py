"""Simulated strategy totals across the decay exponent, with the crossing.

Writes the sweep CSV to --out (default stdout) and the crossing to stderr.
"""

import argparse
import sys

from attnrank.simulator import SimConfig, find_crossing, median_totals, sweep, write_rows_csv
from attnrank.strategies import IndexStrategy


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--lo", type=float, default=0.30)
    p.add_argument("--hi", type=float, default=0.45)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--master-seed", type=int, default=2009)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    args = p.parse_args()

    n = int(round((args.hi - args.lo) / args.step)) + 1
    betas = [round(args.lo + k * args.step, 12) for k in range(n)]
    strategies = [IndexStrategy.parse(s) for s in ("novelty", "popularity", "greedy")]
    rows = sweep(SimConfig(seed=args.master_seed, steps=args.steps), betas, strategies, args.seeds,
                 workers=args.workers)

    crossing = find_crossing(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_rows_csv(rows, fh, crossing, bracket_column=True)
    else:
        write_rows_csv(rows, sys.stdout, crossing, bracket_column=True)

    for beta, by in median_totals(rows).items():
        cells = "  ".join(f"{k}={v:.1f}" for k, v in by.items())
        print(f"beta={beta:.2f}  {cells}", file=sys.stderr)
    print(f"crossing: {crossing}", file=sys.stderr)


if __name__ == "__main__":
    main()
