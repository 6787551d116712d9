"""Command-line front end: ``attnrank {simulate,sweep,phase,fit,synth}``.

Every flag defaults to the digg.com calibration. ``--config FILE`` reads
``key = value`` lines (keys are long flag names) that explicit flags
override. Exit status: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import secrets
import sys
from pathlib import Path

from . import analytics, estimation, simulator
from .model import (
    DIGG_ALPHA,
    DIGG_BETA,
    DIGG_MEAN_FACTOR,
    DIGG_NOISE_STD,
    DIGG_SLOTS,
    DecayLaw,
    NoiseLaw,
    PositionProfile,
    digg_profile,
)
from .strategies import IndexStrategy

SIGN_CONVENTION = "residual > 0: PopularityFirst; residual < 0: NoveltyFirst"


# --- argument types -------------------------------------------------------------


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _positive(text: str) -> float:
    v = _float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _nonnegative(text: str) -> float:
    v = _float(text)
    if not v >= 0.0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _beta(text: str) -> float:
    v = _float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"beta must lie in (0, 1], got {text}")
    return v


def _count(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def _steps(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _strategy(text: str) -> IndexStrategy:
    try:
        return IndexStrategy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _strategies(text: str) -> list[IndexStrategy]:
    return [_strategy(part) for part in text.split(",") if part.strip()]


def _range(text: str) -> tuple[float, float, float | None]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(f"expected lo:hi or lo:hi:step, got {text!r}")
    lo, hi = _float(parts[0]), _float(parts[1])
    step = _positive(parts[2]) if len(parts) == 3 else None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"range upper end below lower end: {text!r}")
    return lo, hi, step


def _grid(rng: tuple[float, float, float | None]) -> list[float]:
    lo, hi, step = rng
    if step is None:
        return [lo] if lo == hi else [lo, hi]
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(n)]


# --- parser ----------------------------------------------------------------------------


def _add_output(p: argparse.ArgumentParser, default: str = "csv") -> None:
    p.add_argument("--format", choices=("csv", "json"), default=default)
    p.add_argument("--out", type=Path, help="output file (default: standard output)")


def _add_sim(p: argparse.ArgumentParser, steps: int) -> None:
    p.add_argument("--alpha", type=_nonnegative, default=DIGG_ALPHA)
    p.add_argument("--beta", type=_beta, default=DIGG_BETA)
    p.add_argument("--steps", type=_steps, default=steps)
    p.add_argument("--seed", type=_seed, help="64-bit seed; drawn from entropy and reported when omitted")
    p.add_argument("--slots", type=_count)
    p.add_argument("--step-minutes", type=_positive, default=5.0)
    p.add_argument("--arrival-interval", type=_positive, default=20.0,
                   help="mean minutes between arrivals ('inf' disables arrivals)")
    p.add_argument("--noise-std", type=_nonnegative, default=DIGG_NOISE_STD)
    p.add_argument("--positions-file", type=Path, help="CSV with columns position,factor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="attnrank", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one front-page run")
    _add_sim(p, steps=100_000)
    p.add_argument("--strategy", type=_strategy, default=IndexStrategy.parse("novelty"))
    p.add_argument("--series", action="store_true", help="include per-step totals (JSON only)")
    _add_output(p)

    p = sub.add_parser("sweep", help="runs over a beta x strategy x replicate grid")
    _add_sim(p, steps=10_000)
    p.add_argument("--beta-range", type=_range, default=(0.30, 0.45, 0.01))
    p.add_argument("--strategies", type=_strategies, default=_strategies("novelty,popularity,greedy"))
    p.add_argument("--seeds", type=_count, default=5, help="replicates per cell")
    p.add_argument("--workers", type=_count, default=1)
    p.add_argument("--crossing", action="store_true",
                   help="append a crossing_bracket column marking where novelty takes the lead")
    _add_output(p)

    p = sub.add_parser("phase", help="analytic critical curve and region map", epilog=SIGN_CONVENTION)
    p.add_argument("--alpha-range", type=_range, default=(0.1, 1.0, 0.05))
    p.add_argument("--beta-range", type=_range, help="beta grid for region labels")
    p.add_argument("--abar", type=_positive, default=DIGG_MEAN_FACTOR)
    p.add_argument("--slots", type=_count, default=DIGG_SLOTS)
    p.add_argument("--arrival-interval", type=_positive, default=20.0)
    p.add_argument("--horizon", type=_positive, default=50_000.0, help="minutes")
    p.add_argument("--bracket", type=_range, default=(0.1, 1.0, None), help="beta bracket lo:hi")
    p.add_argument("--table", choices=("curve", "points"), default="curve",
                   help="which table the CSV format emits")
    _add_output(p)

    p = sub.add_parser("fit", help="fit position factors and decay to a click log")
    p.add_argument("samples", help="CSV click log ('-' for standard input)")
    p.add_argument("--alpha-range", type=_range, default=(*estimation.DEFAULT_ALPHA_BOX, None))
    p.add_argument("--beta-range", type=_range, default=(*estimation.DEFAULT_BETA_BOX, None))
    p.add_argument("--grid", type=_count, default=estimation.GRID_POINTS)
    _add_output(p, default="json")

    p = sub.add_parser("synth", help="write a synthetic click log with known parameters")
    p.add_argument("--alpha", type=_nonnegative, default=DIGG_ALPHA)
    p.add_argument("--beta", type=_beta, default=DIGG_BETA)
    p.add_argument("--noise-std", type=_nonnegative, default=DIGG_NOISE_STD)
    p.add_argument("--slots", type=_count)
    p.add_argument("--positions-file", type=Path)
    p.add_argument("--per-slot", type=_count, default=1000)
    p.add_argument("--layout", choices=("page", "uniform"), default="uniform")
    p.add_argument("--arrival-interval", type=_positive, default=20.0)
    p.add_argument("--max-lifetime", type=_positive, default=60.0)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--out", type=Path)
    return parser


# --- config file ---------------------------------------------------------------


def _config_tokens(path: str, parser: argparse.ArgumentParser, command: str) -> list[str]:
    sub = parser._subparsers._group_actions[0].choices[command]  # type: ignore[union-attr]
    flags = {opt.lstrip("-"): a for a in sub._actions for opt in a.option_strings if opt.startswith("--")}
    tokens: list[str] = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        sub.error(f"cannot read config file: {exc}")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (s.strip() for s in line.partition("="))
        key = key.replace("_", "-")
        if not sep or key not in flags or key in ("config", "help"):
            sub.error(f"{path}:{lineno}: unknown or malformed setting {raw.strip()!r}")
        action = flags[key]
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append(f"--{key}")
        else:
            tokens += [f"--{key}", value]
    return tokens


def _expand_config(argv: list[str], parser: argparse.ArgumentParser) -> list[str]:
    if not argv or argv[0].startswith("-"):
        return argv
    rest, path = [], None
    it = iter(argv[1:])
    for tok in it:
        if tok == "--config":
            path = next(it, None)
            if path is None:
                parser.error("--config needs a file argument")
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
        else:
            rest.append(tok)
    if path is None:
        return argv
    if argv[0] not in parser._subparsers._group_actions[0].choices:  # type: ignore[union-attr]
        return argv
    return [argv[0], *_config_tokens(path, parser, argv[0]), *rest]


# --- commands -------------------------------------------------------------------


@contextlib.contextmanager
def _output(path: Path | None):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(64)
        print(f"seed: {seed}", file=sys.stderr)
    return seed


def _profile(args) -> PositionProfile:
    if args.positions_file is not None:
        profile = PositionProfile.from_csv(args.positions_file)
        if args.slots is not None and args.slots != len(profile):
            raise ValueError(f"--slots {args.slots} disagrees with {len(profile)} rows in the positions file")
        return profile
    return digg_profile(args.slots or DIGG_SLOTS)


def _sim_config(args, seed: int) -> simulator.SimConfig:
    profile = _profile(args)
    return simulator.SimConfig(
        strategy=getattr(args, "strategy", IndexStrategy.parse("novelty")),
        steps=args.steps,
        seed=seed,
        slots=len(profile),
        step_minutes=args.step_minutes,
        arrival_interval_minutes=args.arrival_interval,
        decay=DecayLaw(args.alpha, args.beta),
        noise=NoiseLaw(args.noise_std),
        positions=profile,
        record_series=getattr(args, "series", False),
    )


def cmd_simulate(args) -> int:
    config = _sim_config(args, _resolve_seed(args.seed))
    summary = simulator.run(config)
    with _output(args.out) as fh:
        if args.format == "csv":
            row = simulator.SweepRow(config.decay.beta, config.strategy.name, config.seed, summary.total_diggs)
            simulator.write_rows_csv([row], fh)
        else:
            doc = {
                "alpha": config.decay.alpha,
                "beta": config.decay.beta,
                "strategy": config.strategy.name,
                "seed": config.seed,
                "steps": config.steps,
                "total_diggs": summary.total_diggs,
                "stories_created": summary.stories_created,
            }
            if summary.per_step_totals is not None:
                doc["per_step_totals"] = summary.per_step_totals
            fh.write(json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_sweep(args) -> int:
    base = _sim_config(args, _resolve_seed(args.seed))
    betas = _grid(args.beta_range)
    for b in betas:
        if not 0.0 < b <= 1.0:
            raise ValueError(f"beta grid value {b} outside (0, 1]")
    rows = simulator.sweep(base, betas, args.strategies, args.seeds, workers=args.workers)
    crossing = simulator.find_crossing(rows) if len(args.strategies) > 1 and any(
        s.name == "novelty" for s in args.strategies) else None
    if args.crossing and crossing is None:
        print("no crossing: novelty never takes the lead on this grid", file=sys.stderr)
    with _output(args.out) as fh:
        if args.format == "csv":
            simulator.write_rows_csv(rows, fh, crossing, bracket_column=args.crossing)
        else:
            doc = {
                "master_seed": base.seed,
                "alpha": base.decay.alpha,
                "steps": base.steps,
                "rows": [
                    {"beta": r.beta, "strategy": r.strategy, "seed": r.seed, "total_diggs": r.total_diggs}
                    for r in rows
                ],
                "crossing": None if crossing is None
                else {"beta": crossing.beta, "lo": crossing.lo, "hi": crossing.hi},
            }
            fh.write(json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_phase(args) -> int:
    params = analytics.CriticalParams(args.abar, args.slots, args.arrival_interval, args.horizon)
    betas = _grid(args.beta_range) if args.beta_range else None
    lo, hi, _ = args.bracket
    diagram = analytics.phase_diagram(_grid(args.alpha_range), params, betas, bracket=(lo, hi))
    for alpha, msg in diagram.failures.items():
        print(f"alpha={alpha!r}: {msg}", file=sys.stderr)
    with _output(args.out) as fh:
        if args.format == "csv":
            if args.table == "curve":
                analytics.write_curve_csv(diagram, fh)
            else:
                fh.write(f"# {SIGN_CONVENTION}\n")
                analytics.write_points_csv(diagram, fh)
        else:
            doc = {
                "params": {"abar": params.abar, "slots": params.slots,
                           "arrival_interval": params.arrival_interval, "horizon": params.horizon},
                "sign_convention": SIGN_CONVENTION,
                "curve": [{"alpha": a, "beta_critical": b} for a, b in diagram.curve],
                "points": [
                    {"alpha": p.alpha, "beta": p.beta, "residual": p.residual, "region": p.region.value}
                    for p in diagram.points
                ],
                "failures": {repr(a): m for a, m in diagram.failures.items()},
            }
            fh.write(json.dumps(doc, indent=2) + "\n")
    return 0


def cmd_fit(args) -> int:
    if args.samples == "-":
        samples = estimation.load_samples(sys.stdin)
    else:
        with open(args.samples, newline="") as fh:
            samples = estimation.load_samples(fh)
    if not samples:
        raise ValueError(f"{args.samples}: no sample rows")
    result = estimation.fit_decay(
        samples, args.alpha_range[:2], args.beta_range[:2], grid=args.grid
    )
    with _output(args.out) as fh:
        if args.format == "json":
            fh.write(result.to_json() + "\n")
        else:
            fh.write("parameter,value\n")
            fh.write(f"alpha,{result.alpha!r}\nbeta,{result.beta!r}\nrss,{result.rss!r}\n")
            for k, v in sorted(result.position_factors.items()):
                fh.write(f"a_{k},{v!r}\n")
    return 0


def cmd_synth(args) -> int:
    rows = estimation.synthetic_log(
        _profile(args),
        DecayLaw(args.alpha, args.beta),
        NoiseLaw(args.noise_std),
        args.per_slot,
        _resolve_seed(args.seed),
        layout=args.layout,
        arrival_interval=args.arrival_interval,
        max_lifetime=args.max_lifetime,
    )
    with _output(args.out) as fh:
        estimation.write_samples_csv(rows, fh)
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "phase": cmd_phase,
    "fit": cmd_fit,
    "synth": cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(_expand_config(argv, parser))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"attnrank {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
