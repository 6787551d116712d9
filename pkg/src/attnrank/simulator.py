"""Discrete-time front-page simulation.

One step of length ``dt`` minutes:

1. rank the page under the configured index strategy;
2. slot ``i`` draws ``X ~ Normal(1, std)`` and its story grows by
   ``dt * a_i * r_t * X * N`` (clicks floored at ``DIGG_FLOOR``);
3. ``k ~ Poisson(dt / s)`` new stories arrive, each immediately followed by
   eviction of the lowest-index story so the page keeps ``m`` stories;
4. the clock advances by ``dt``.

Randomness comes from a numpy ``Generator`` (PCG64) seeded with
``SimConfig.seed``. Noise rows and arrival uniforms are drawn in fixed
blocks of ``_BLOCK`` steps, so a run is bit-reproducible from its seed
however it is stepped.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .model import (
    DIGG_FLOOR,
    DIGG_SLOTS,
    DecayLaw,
    NoiseLaw,
    PositionProfile,
    StoryState,
    digg_profile,
    novelty,
)
from .strategies import NOVELTY, IndexStrategy, Kind

_BLOCK = 1024
SWEEP_COLUMNS = ("beta", "strategy", "seed", "total_diggs")


@dataclass(frozen=True)
class SimConfig:
    strategy: IndexStrategy = NOVELTY
    steps: int = 100_000
    seed: int = 0
    slots: int = DIGG_SLOTS
    step_minutes: float = 5.0
    arrival_interval_minutes: float = 20.0
    decay: DecayLaw = field(default_factory=DecayLaw)
    noise: NoiseLaw = field(default_factory=NoiseLaw)
    positions: PositionProfile | None = None
    record_series: bool = False

    def __post_init__(self):
        if self.positions is None:
            object.__setattr__(self, "positions", digg_profile(self.slots))
        if len(self.positions) != self.slots:
            raise ValueError(
                f"slots={self.slots} but the position profile has {len(self.positions)} factors"
            )
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if not self.step_minutes > 0.0:
            raise ValueError("step_minutes must be positive")
        if not self.arrival_interval_minutes > 0.0:
            raise ValueError("arrival_interval_minutes must be positive (use inf to disable arrivals)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def arrival_rate(self) -> float:
        """Mean arrivals per step."""
        return self.step_minutes / self.arrival_interval_minutes

    @property
    def horizon_minutes(self) -> float:
        return self.steps * self.step_minutes


@dataclass
class RunSummary:
    total_diggs: float
    stories_created: int
    final_page: list[StoryState]
    per_step_totals: list[float] | None = None


def _poisson_cdf(lam: float) -> list[float]:
    if lam == 0.0:
        return [1.0]
    cdf, acc, k = [], 0.0, 0
    while True:
        term = math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))
        acc += term
        cdf.append(acc)
        # rounding can leave acc just short of 1, so stop on the term size
        if k > lam and (1.0 - acc < 1e-16 or term < 1e-18):
            break
        k += 1
    cdf[-1] = 1.0
    return cdf


class SimState:
    """Mutable page state threaded through ``step``."""

    def __init__(self, config: SimConfig):
        m = config.slots
        self.step_index = 0
        self.diggs = [1.0] * m
        self.births = [0] * m  # arrival step index
        self.ids = list(range(1, m + 1))
        self.next_id = m
        self.total = 0.0
        self.series: list[float] | None = [] if config.record_series else None
        self.rng = np.random.Generator(np.random.PCG64(config.seed))
        self._noise: list[list[float]] = []
        self._uniform: list[float] = []
        self._cursor = _BLOCK
        self._novelty: list[float] = []
        self._extend_novelty(config, config.steps + 1)
        self._cdf = _poisson_cdf(config.arrival_rate)

    @property
    def stories_created(self) -> int:
        return self.next_id

    def _extend_novelty(self, config: SimConfig, n: int) -> None:
        dt, decay = config.step_minutes, config.decay
        self._novelty.extend(novelty(decay, k * dt) for k in range(len(self._novelty), n))

    def _draw(self, config: SimConfig) -> tuple[list[float], float]:
        if self._cursor == _BLOCK:
            self._noise = self.rng.normal(1.0, config.noise.std, size=(_BLOCK, config.slots)).tolist()
            self._uniform = self.rng.random(_BLOCK).tolist()
            self._cursor = 0
        i = self._cursor
        self._cursor += 1
        return self._noise[i], self._uniform[i]

    def page(self, config: SimConfig) -> list[StoryState]:
        """Stories in display order at the current time."""
        order = self._order(config, self.step_index)
        dt = config.step_minutes
        return [StoryState(self.ids[j], self.diggs[j], self.births[j] * dt) for j in order]

    def _keys(self, config: SimConfig, k: int) -> list[tuple[float, int]]:
        if k >= len(self._novelty):
            self._extend_novelty(config, 2 * k + 1)
        score = config.strategy.scorer(config.decay)
        dt, table = config.step_minutes, self._novelty
        return [
            (score(n, (k - b) * dt, table[k - b]), i)
            for n, b, i in zip(self.diggs, self.births, self.ids)
        ]

    def _order(self, config: SimConfig, k: int) -> list[int]:
        keys = self._keys(config, k)
        return sorted(range(len(keys)), key=keys.__getitem__, reverse=True)

    def time(self, config: SimConfig) -> float:
        return self.step_index * config.step_minutes


def init(config: SimConfig) -> SimState:
    return SimState(config)


def step(state: SimState, config: SimConfig) -> SimState:
    """Advance ``state`` by one step in place and return it."""
    k = state.step_index
    dt = config.step_minutes
    factors = config.positions.factors
    table = state._novelty
    order = state._order(config, k)
    x, u = state._draw(config)

    diggs, births = state.diggs, state.births
    gained = 0.0
    for slot, j in enumerate(order):
        n = diggs[j]
        grown = n + dt * factors[slot] * table[k - births[j]] * x[slot] * n
        if grown < DIGG_FLOOR:
            grown = DIGG_FLOOR
        gained += grown - n
        diggs[j] = grown
    state.total += gained
    if state.series is not None:
        state.series.append(gained)

    arrivals = bisect.bisect_right(state._cdf, u)
    for _ in range(arrivals):
        state.next_id += 1
        diggs.append(1.0)
        births.append(k + 1)
        state.ids.append(state.next_id)
        keys = state._keys(config, k + 1)
        drop = min(range(len(keys)), key=keys.__getitem__)
        del diggs[drop], births[drop], state.ids[drop]

    state.step_index = k + 1
    return state


def run(config: SimConfig) -> RunSummary:
    state = init(config)
    for _ in range(config.steps):
        step(state, config)
    return RunSummary(
        total_diggs=state.total,
        stories_created=state.stories_created,
        final_page=state.page(config),
        per_step_totals=state.series,
    )


def relative_performance(total_o1: float, total_o2: float) -> float:
    """Share ``o2 / (o1 + o2)`` of the second strategy's clicks."""
    if total_o1 < 0.0 or total_o2 < 0.0:
        raise ValueError("totals must be nonnegative")
    if total_o1 == 0.0 and total_o2 == 0.0:
        raise ValueError("relative performance undefined when both totals are zero")
    return total_o2 / (total_o1 + total_o2)


# --- sweeps -----------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    beta: float
    strategy: str
    seed: int
    total_diggs: float


def derive_seed(master: int, beta_index: int, strategy_index: int, seed_index: int) -> int:
    seq = np.random.SeedSequence(master, spawn_key=(beta_index, strategy_index, seed_index))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _total(config: SimConfig) -> float:
    return run(config).total_diggs


def sweep(
    base: SimConfig,
    beta_values: Sequence[float],
    strategies: Sequence[IndexStrategy],
    seeds: int | Sequence[int],
    workers: int = 1,
) -> list[SweepRow]:
    """One run per (beta, strategy, replicate), rows in grid order.

    ``seeds`` is a replicate count or a list of replicate labels; each run's
    generator seed is derived from ``base.seed`` and the grid coordinates
    and reported in the ``seed`` column, so any row can be rerun alone.
    """
    replicates = range(seeds) if isinstance(seeds, int) else list(seeds)
    if not beta_values or not strategies or not replicates:
        raise ValueError("sweep grids must be nonempty")
    cells, configs = [], []
    for bi, beta in enumerate(beta_values):
        decay = DecayLaw(base.decay.alpha, beta)
        for si, strat in enumerate(strategies):
            for ki, _ in enumerate(replicates):
                s = derive_seed(base.seed, bi, si, ki)
                cells.append((beta, strat.name, s))
                configs.append(replace(base, decay=decay, strategy=strat, seed=s, record_series=False))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            totals = list(ex.map(_total, configs, chunksize=max(1, len(configs) // (4 * workers))))
    else:
        totals = [_total(c) for c in configs]
    return [SweepRow(b, name, s, t) for (b, name, s), t in zip(cells, totals)]


def median_totals(rows: Iterable[SweepRow]) -> dict[float, dict[str, float]]:
    """beta -> strategy -> median total over replicates."""
    groups: dict[float, dict[str, list[float]]] = {}
    for r in rows:
        groups.setdefault(r.beta, {}).setdefault(r.strategy, []).append(r.total_diggs)
    return {
        b: {name: statistics.median(v) for name, v in by.items()}
        for b, by in sorted(groups.items())
    }


@dataclass(frozen=True)
class Crossing:
    beta: float  # interpolated
    lo: float
    hi: float


def find_crossing(rows: Iterable[SweepRow], leader: str = Kind.NOVELTY.value) -> Crossing | None:
    """First beta (increasing) at which ``leader``'s median total overtakes
    every other strategy in the sweep.

    The crossing is interpolated linearly in the log-ratio of the leader's
    total to the best competitor's. ``None`` if the leader never goes from
    behind to ahead on the grid.
    """
    med = median_totals(rows)
    betas, margins = [], []
    for b, by in med.items():
        others = [v for k, v in by.items() if k != leader]
        if leader not in by or not others:
            raise ValueError(f"sweep rows lack {leader!r} or any competitor at beta={b}")
        best_other = max(others)
        lead = by[leader]
        if lead <= 0.0 or best_other <= 0.0:
            margin = lead - best_other
        else:
            margin = math.log(lead) - math.log(best_other)
        betas.append(b)
        margins.append(margin)
    for j in range(1, len(betas)):
        m0, m1 = margins[j - 1], margins[j]
        if m0 <= 0.0 < m1:
            b0, b1 = betas[j - 1], betas[j]
            return Crossing(b0 + (b1 - b0) * (-m0) / (m1 - m0), b0, b1)
    return None


def write_rows_csv(
    rows: Iterable[SweepRow],
    fh: io.TextIOBase,
    crossing: Crossing | None = None,
    bracket_column: bool = False,
) -> None:
    """CSV with columns ``beta,strategy,seed,total_diggs``.

    ``bracket_column`` appends ``crossing_bracket``: 1 on rows whose beta is
    one of the two grid values bracketing ``crossing``, else 0.
    """
    w = csv.writer(fh, lineterminator="\n")
    header = list(SWEEP_COLUMNS)
    if bracket_column:
        header.append("crossing_bracket")
    w.writerow(header)
    bracket = (crossing.lo, crossing.hi) if crossing is not None else ()
    for r in rows:
        line = [repr(r.beta), r.strategy, r.seed, repr(r.total_diggs)]
        if bracket_column:
            line.append(int(r.beta in bracket))
        w.writerow(line)
