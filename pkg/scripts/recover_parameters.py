"""Fit a synthetic click log and report how well the generating values come back."""

import argparse
import io

from attnrank.estimation import fit_decay, fit_position_factor, load_samples, synthetic_log, write_samples_csv
from attnrank.model import DecayLaw, NoiseLaw, digg_profile


def samples(rows):
    buf = io.StringIO()
    write_samples_csv(rows, buf)
    buf.seek(0)
    return load_samples(buf)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--per-slot", type=int, default=1000)
    p.add_argument("--noise-std", type=float, default=0.5)
    p.add_argument("--seeds", type=int, default=10)
    args = p.parse_args()

    profile, decay, noise = digg_profile(), DecayLaw(0.4, 0.4), NoiseLaw(args.noise_std)
    print("seed  worst_a_err  alpha    beta")
    for seed in range(args.seeds):
        page = samples(synthetic_log(profile, decay, noise, args.per_slot, seed, layout="page"))
        worst = max(
            abs(fit_position_factor([q for q in page if q.position == i], decay) / a - 1)
            for i, a in enumerate(profile.factors, start=1)
        )
        fit = fit_decay(samples(synthetic_log(profile, decay, noise, args.per_slot, seed, layout="uniform")))
        print(f"{seed:4d}  {100 * worst:10.2f}%  {fit.alpha:.4f}  {fit.beta:.4f}")


if __name__ == "__main__":
    main()
