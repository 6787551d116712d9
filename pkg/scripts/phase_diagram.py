"""Critical curve beta*(alpha) and, optionally, a plot of the two regions."""

import argparse
import sys

import numpy as np

from attnrank.analytics import CriticalParams, critical_residual, phase_diagram, write_curve_csv


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--abar", type=float, default=0.08)
    p.add_argument("--horizon", type=float, default=50_000.0)
    p.add_argument("--plot", help="write a PNG here (needs matplotlib)")
    args = p.parse_args()

    params = CriticalParams(abar=args.abar, horizon=args.horizon)
    alphas = [round(0.1 + 0.05 * k, 12) for k in range(19)]
    diagram = phase_diagram(alphas, params)
    write_curve_csv(diagram, sys.stdout)

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        a_grid = np.linspace(0.1, 1.0, 60)
        b_grid = np.linspace(0.1, 1.0, 60)
        res = np.array([[critical_residual(a, b, params) for a in a_grid] for b in b_grid])
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.contourf(a_grid, b_grid, np.sign(res), levels=[-1.5, 0, 1.5], colors=["#cfe3f5", "#f5d9cf"])
        ax.plot(*zip(*diagram.curve), "k-", lw=1.5)
        ax.plot([0.4], [0.4], "ko")
        ax.set_xlabel("alpha")
        ax.set_ylabel("beta")
        ax.text(0.7, 0.85, "NoveltyFirst", ha="center")
        ax.text(0.25, 0.15, "PopularityFirst", ha="center")
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)


if __name__ == "__main__":
    main()
