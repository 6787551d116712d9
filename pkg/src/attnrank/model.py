"""Domain types and the growth kernel.

A story's click count evolves multiplicatively,

    N_{t+dt} = N_t * (1 + dt * a_i * r_t * X_t),

where ``r_t = exp(-alpha * t**beta)`` is the novelty factor, ``a_i`` the
attenuation of the slot the story occupies and ``X_t`` a noise draw with
mean one. All times are in minutes.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from scipy.optimize import brentq

DIGG_FLOOR = 1e-6

# Measured digg.com calibration.
DIGG_ALPHA = 0.4
DIGG_BETA = 0.4
DIGG_TOP_FACTOR = 0.120
DIGG_SECOND_FACTOR = 0.106
DIGG_MEAN_FACTOR = 0.08
DIGG_SLOTS = 15
DIGG_NOISE_STD = 0.5


@dataclass(frozen=True)
class DecayLaw:
    """Stretched-exponential novelty decay ``exp(-alpha * t**beta)``."""

    alpha: float = DIGG_ALPHA
    beta: float = DIGG_BETA

    def __post_init__(self):
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha!r}")
        if not (0.0 < self.beta <= 1.0):
            raise ValueError(f"beta must lie in (0, 1], got {self.beta!r}")

    def __call__(self, t: float) -> float:
        return novelty(self, t)


@dataclass(frozen=True)
class NoiseLaw:
    """Normal noise with mean fixed at one."""

    std: float = DIGG_NOISE_STD
    mean: float = field(default=1.0, init=False)

    def __post_init__(self):
        if not (self.std >= 0.0 and math.isfinite(self.std)):
            raise ValueError(f"noise std must be finite and >= 0, got {self.std!r}")


@dataclass(frozen=True)
class PositionProfile:
    """Per-slot growth attenuation, slot 1 first."""

    factors: tuple[float, ...]

    def __post_init__(self):
        factors = tuple(float(a) for a in self.factors)
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise ValueError("a position profile needs at least one slot")
        if any(not (a > 0.0 and math.isfinite(a)) for a in factors):
            raise ValueError("position factors must be finite and positive")
        if any(a < b for a, b in zip(factors, factors[1:])):
            raise ValueError("position factors must be nonincreasing in slot index")

    @property
    def abar(self) -> float:
        return math.fsum(self.factors) / len(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    @classmethod
    def uniform(cls, slots: int, value: float = DIGG_MEAN_FACTOR) -> "PositionProfile":
        return cls((value,) * slots)

    @classmethod
    def from_csv(cls, source: str | Path | io.TextIOBase) -> "PositionProfile":
        """Read ``position,factor`` rows; positions must run 1..m without gaps."""
        if isinstance(source, (str, Path)):
            with open(source, newline="") as fh:
                return cls._parse(fh)
        return cls._parse(source)

    @classmethod
    def _parse(cls, fh: Iterable[str]) -> "PositionProfile":
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["position", "factor"]:
            raise ValueError("position profile must have header 'position,factor'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append((int(row[0]), float(row[1])))
            except (ValueError, IndexError):
                raise ValueError(f"row {lineno}: expected integer position and real factor") from None
        rows.sort()
        if [p for p, _ in rows] != list(range(1, len(rows) + 1)):
            raise ValueError("positions must be contiguous 1..m")
        return cls(tuple(a for _, a in rows))

    def to_csv(self) -> str:
        lines = ["position,factor"]
        lines += [f"{i},{a!r}" for i, a in enumerate(self.factors, start=1)]
        return "\n".join(lines) + "\n"


def digg_profile(
    slots: int = DIGG_SLOTS,
    first: float = DIGG_TOP_FACTOR,
    second: float = DIGG_SECOND_FACTOR,
    mean: float = DIGG_MEAN_FACTOR,
) -> PositionProfile:
    """Default profile ``a_i = u + v * rho**(i-1)`` pinned to the two measured
    top-slot factors and the page mean.

    Falls back to a clamped, rescaled linear ramp when no ``rho`` in (0, 1)
    reproduces the mean (e.g. very short pages).
    """
    if slots < 1:
        raise ValueError("slots must be >= 1")
    if slots == 1:
        return PositionProfile((mean,))
    gap = first - second

    def mean_gap(rho: float) -> float:
        v = gap / (1.0 - rho)
        return v * (1.0 - (1.0 - rho**slots) / (slots * (1.0 - rho))) - (first - mean)

    lo, hi = 1e-9, 1.0 - 1e-9
    if slots > 2 and mean_gap(lo) * mean_gap(hi) < 0.0:
        rho = brentq(mean_gap, lo, hi, xtol=1e-15)
        v = gap / (1.0 - rho)
        u = first - v
        factors = [u + v * rho**i for i in range(slots)]
        if min(factors) > 0.0:
            return PositionProfile(tuple(factors))
    step = 2.0 * (first - mean) / (slots - 1)
    ramp = [max(first - i * step, 0.01) for i in range(slots)]
    scale = mean / (math.fsum(ramp) / slots)
    return PositionProfile(tuple(a * scale for a in ramp))


@dataclass(frozen=True)
class StoryState:
    """One story on the page: identity, click count and arrival time."""

    id: int
    diggs: float
    birth_time: float

    def lifetime(self, now: float) -> float:
        age = now - self.birth_time
        if age < 0.0:
            raise ValueError(f"story {self.id} has not been born at t={now}")
        return age


def novelty(decay: DecayLaw, t: float) -> float:
    if t < 0.0:
        raise ValueError(f"lifetime must be >= 0, got {t!r}")
    if t == 0.0 or decay.alpha == 0.0:
        return 1.0
    return math.exp(-decay.alpha * t**decay.beta)


def growth_increment(n: float, a_i: float, r: float, x: float, dt: float) -> float:
    """Clicks gained over ``dt`` minutes by a story with ``n`` clicks in a slot
    with factor ``a_i``; negative when the noise draw ``x`` is."""
    if not n > 0.0:
        raise ValueError(f"digg count must be positive, got {n!r}")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    return dt * a_i * r * x * n


def log_growth_rate(n_before: float, n_after: float, dt: float) -> float:
    if not (n_before > 0.0 and n_after > 0.0):
        raise ValueError("digg counts must be positive")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    return (math.log(n_after) - math.log(n_before)) / dt

