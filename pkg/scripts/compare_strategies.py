"""Median totals of every ordering strategy at the digg calibration.

    python3 scripts/compare_strategies.py --seeds 10 --steps 100000
"""

import argparse
import statistics

from attnrank.simulator import SimConfig, run
from attnrank.strategies import IndexStrategy


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--strategies", default="novelty,popularity,greedy,weighted")
    args = p.parse_args()

    medians = {}
    for name in args.strategies.split(","):
        strat = IndexStrategy.parse(name)
        totals = [run(SimConfig(strategy=strat, steps=args.steps, seed=s)).total_diggs for s in range(args.seeds)]
        medians[strat.name] = statistics.median(totals)
        print(f"{strat.name:>14}  median {medians[strat.name]:14.1f}  min {min(totals):14.1f}  max {max(totals):14.1f}")

    if "novelty" in medians:
        base = medians["novelty"]
        for name, m in medians.items():
            if name != "novelty":
                print(f"{name} / novelty = {m / base:.4f}")


if __name__ == "__main__":
    main()
