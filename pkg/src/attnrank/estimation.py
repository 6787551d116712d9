"""Position-factor and decay estimation from click logs.

Each log row is one observation of a story sitting in slot ``i`` with
lifetime ``t``; its log growth rate ``s = log(N_after / N_before) / dt``
has expectation ``a_i * r_t``. For fixed decay the least-squares ``a_i``
is closed form, so the joint fit only searches over ``(alpha, beta)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .model import DecayLaw, NoiseLaw, PositionProfile, log_growth_rate, novelty

SAMPLE_COLUMNS = (
    "story_id",
    "position",
    "lifetime_minutes",
    "diggs_before",
    "diggs_after",
    "interval_minutes",
)
DEFAULT_ALPHA_BOX = (0.05, 1.0)
DEFAULT_BETA_BOX = (0.1, 1.0)
GRID_POINTS = 41
UNIDENTIFIED_ALPHA = 1e-3


class SampleFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SamplePoint:
    position: int
    lifetime: float
    rate: float

    def __post_init__(self):
        if self.position < 1:
            raise ValueError(f"position must be >= 1, got {self.position}")
        if self.lifetime < 0.0:
            raise ValueError(f"lifetime must be >= 0, got {self.lifetime}")


@dataclass
class FitResult:
    position_factors: dict[int, float]
    alpha: float
    beta: float
    rss: float
    # False when the fitted alpha is ~0, so r_t ~ 1 and beta has no effect
    beta_identified: bool = True
    grid_rss_min: float = field(default=math.inf, repr=False)

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": self.alpha,
                "beta": self.beta,
                "position_factors": {str(k): v for k, v in sorted(self.position_factors.items())},
                "rss": self.rss,
                "beta_identified": self.beta_identified,
            },
            indent=2,
        )


def load_samples(source: io.TextIOBase | Iterable[str]) -> list[SamplePoint]:
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None:
        raise SampleFormatError("empty sample file; expected header " + ",".join(SAMPLE_COLUMNS))
    if tuple(h.strip() for h in header) != SAMPLE_COLUMNS:
        raise SampleFormatError(
            "malformed header; expected " + ",".join(SAMPLE_COLUMNS) + f", got {','.join(header)}"
        )
    samples = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(SAMPLE_COLUMNS):
            raise SampleFormatError(f"row {lineno}: expected {len(SAMPLE_COLUMNS)} fields, got {len(row)}")
        try:
            position = int(row[1])
            lifetime, before, after, interval = (float(v) for v in row[2:])
        except ValueError:
            raise SampleFormatError(f"row {lineno}: nonnumeric field") from None
        if not (before > 0.0 and after > 0.0):
            raise SampleFormatError(f"row {lineno}: digg counts must be positive")
        if not interval > 0.0:
            raise SampleFormatError(f"row {lineno}: interval must be positive")
        try:
            samples.append(SamplePoint(position, lifetime, log_growth_rate(before, after, interval)))
        except ValueError as exc:
            raise SampleFormatError(f"row {lineno}: {exc}") from None
    return samples


def fit_position_factor(samples: Sequence[SamplePoint], decay: DecayLaw) -> float:
    """Least-squares ``a`` minimising ``sum (s_j - a r_j)^2`` for one slot."""
    if not samples:
        raise ValueError("no samples to fit")
    terms = [(p.rate, novelty(decay, p.lifetime)) for p in samples]
    num = math.fsum(s * r for s, r in terms)
    den = math.fsum(r * r for _, r in terms)
    if den == 0.0:
        raise ValueError("novelty is zero at every sample lifetime; the factor is unidentifiable")
    return num / den


class _Design:
    """Samples packed as arrays for repeated RSS evaluation."""

    def __init__(self, samples: Sequence[SamplePoint]):
        if not samples:
            raise ValueError("no samples to fit")
        pos = np.array([p.position for p in samples])
        self.slots, self.index = np.unique(pos, return_inverse=True)
        self.t = np.array([p.lifetime for p in samples], dtype=float)
        self.s = np.array([p.rate for p in samples], dtype=float)
        if np.unique(self.t).size < 2:
            raise ValueError("samples need at least two distinct lifetimes to fit the decay")

    def factors(self, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
        r = np.exp(-alpha * self.t**beta)
        num = np.bincount(self.index, weights=self.s * r, minlength=self.slots.size)
        den = np.bincount(self.index, weights=r * r, minlength=self.slots.size)
        with np.errstate(invalid="ignore", divide="ignore"):
            a = np.where(den > 0.0, num / den, 0.0)
        return a, r

    def rss(self, alpha: float, beta: float) -> float:
        a, r = self.factors(alpha, beta)
        resid = self.s - a[self.index] * r
        return float(resid @ resid)


def fit_decay(
    samples: Sequence[SamplePoint],
    alpha_box: tuple[float, float] = DEFAULT_ALPHA_BOX,
    beta_box: tuple[float, float] = DEFAULT_BETA_BOX,
    grid: int | tuple[int, int] = GRID_POINTS,
    tol: float = 1e-9,
    max_sweeps: int = 500,
) -> FitResult:
    """Joint fit of ``(alpha, beta)`` and every slot's factor.

    Exhaustive search on a ``grid x grid`` lattice over the boxes (ties go to
    the lexicographically smallest ``(alpha, beta)``), then coordinate
    descent from the best lattice point, one bounded line search per
    coordinate per sweep, until a sweep improves the RSS by less than ``tol``.
    """
    (a_lo, a_hi), (b_lo, b_hi) = alpha_box, beta_box
    if not (0.0 <= a_lo <= a_hi and 0.0 < b_lo <= b_hi <= 1.0):
        raise ValueError(f"invalid search boxes alpha={alpha_box}, beta={beta_box}")
    na, nb = (grid, grid) if isinstance(grid, int) else grid
    if na < 1 or nb < 1:
        raise ValueError("grid must have at least one point per axis")
    design = _Design(samples)

    alphas = np.linspace(a_lo, a_hi, na)
    betas = np.linspace(b_lo, b_hi, nb)
    table = np.array([[design.rss(a, b) for b in betas] for a in alphas])
    i, j = np.unravel_index(int(np.argmin(table)), table.shape)
    alpha, beta = float(alphas[i]), float(betas[j])
    best = float(table[i, j])
    grid_min = best

    for _ in range(max_sweeps):
        before = best
        if a_hi > a_lo:
            res = minimize_scalar(
                lambda a: design.rss(a, beta), bounds=(a_lo, a_hi), method="bounded",
                options={"xatol": 1e-12},
            )
            if res.fun < best:
                alpha, best = float(res.x), float(res.fun)
        if b_hi > b_lo:
            res = minimize_scalar(
                lambda b: design.rss(alpha, b), bounds=(b_lo, b_hi), method="bounded",
                options={"xatol": 1e-12},
            )
            if res.fun < best:
                beta, best = float(res.x), float(res.fun)
        if before - best < tol:
            break

    factors, _ = design.factors(alpha, beta)
    position_factors = {int(k): float(v) for k, v in zip(design.slots, factors)}
    bad = [k for k, v in position_factors.items() if not v > 0.0]
    if bad:
        raise ValueError(f"fitted position factors are not positive for slots {bad}")
    return FitResult(
        position_factors=position_factors,
        alpha=alpha,
        beta=beta,
        rss=best,
        beta_identified=alpha >= UNIDENTIFIED_ALPHA,
        grid_rss_min=grid_min,
    )


def expected_growth_curve(a_hat: float, decay: DecayLaw, t_grid: Iterable[float]) -> list[tuple[float, float]]:
    if not a_hat > 0.0:
        raise ValueError("a_hat must be positive")
    return [(t, a_hat * novelty(decay, t)) for t in t_grid]


# --- synthetic logs -----------------------------------------------------------


def synthetic_log(
    profile: PositionProfile,
    decay: DecayLaw,
    noise: NoiseLaw,
    per_slot: int,
    seed: int,
    layout: str = "uniform",
    arrival_interval: float = 20.0,
    max_lifetime: float = 60.0,
    interval: float = 5.0,
) -> list[tuple]:
    """Log rows in the ``load_samples`` schema with known generating parameters.

    ``layout="page"`` observes slot ``i`` at lifetimes in
    ``[(i-1)*s, i*s]``, where a story sits on a novelty-ordered page that
    receives one story every ``s = arrival_interval`` minutes.
    ``layout="uniform"`` draws every slot's lifetimes from
    ``[0, max_lifetime]``, which is what a joint decay fit needs. Lifetimes
    fall on the refresh grid either way.

    Growth over a row is ``N_after = N_before * exp(interval * a_i r_t X)``
    so its log rate is exactly ``a_i r_t X``.
    """
    if layout not in ("page", "uniform"):
        raise ValueError(f"unknown layout {layout!r}")
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = []
    story = 0
    for slot, a in enumerate(profile.factors, start=1):
        if layout == "page":
            lo = math.ceil((slot - 1) * arrival_interval / interval)
            hi = math.floor(slot * arrival_interval / interval)
        else:
            lo, hi = 0, math.floor(max_lifetime / interval)
        ticks = rng.integers(lo, hi + 1, size=per_slot)
        x = rng.normal(1.0, noise.std, size=per_slot)
        before = np.exp(rng.uniform(0.0, math.log(1000.0), size=per_slot))
        for k, xk, nb in zip(ticks.tolist(), x.tolist(), before.tolist()):
            story += 1
            t = k * interval
            after = nb * math.exp(interval * a * novelty(decay, t) * xk)
            rows.append((story, slot, t, nb, after, interval))
    return rows


def write_samples_csv(rows: Iterable[tuple], fh: io.TextIOBase) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SAMPLE_COLUMNS)
    for story, slot, t, before, after, interval in rows:
        w.writerow([story, slot, repr(float(t)), repr(before), repr(after), repr(float(interval))])
