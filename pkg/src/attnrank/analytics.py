"""Closed-form log-performance of novelty-first and popularity-first pages,
the critical equation separating them, and the phase diagram.

Popularity ordering freezes the initial page, so each story collects
``E log N ~ abar * int_0^inf r_t dt``. Novelty ordering turns the page over
every ``m*s`` minutes (one page cycle); a story collects
``abar * int_0^{ms} r_t dt`` per cycle and there are ``T/(ms)`` cycles. The
two are equal where

    abar * int_{ms}^inf r_t dt = log(T / (ms)),

and for ``r_t = exp(-alpha t**beta)`` the tail integral is
``alpha**(-1/beta) / beta * Gamma(1/beta, alpha (ms)**beta)``.

Residual sign convention (also written into CSV headers by the CLI):
positive residual -> popularity first, negative -> novelty first.
"""

from __future__ import annotations

import csv
import decimal
import enum
import io
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from scipy import integrate

from .model import DIGG_MEAN_FACTOR, DIGG_SLOTS, DecayLaw

CRITICAL_TOLERANCE = 1e-3
_EPS = sys.float_info.epsilon
_MAX_TERMS = 10_000


class DivergentIntegralError(ValueError):
    """The novelty integral diverges (alpha = 0)."""


class NoRootError(ValueError):
    def __init__(self, alpha: float, lo: float, hi: float, res_lo: float, res_hi: float):
        self.alpha, self.lo, self.hi, self.res_lo, self.res_hi = alpha, lo, hi, res_lo, res_hi
        super().__init__(
            f"critical residual does not change sign on beta in [{lo}, {hi}] at alpha={alpha}: "
            f"residual({lo})={res_lo!r}, residual({hi})={res_hi!r}"
        )


# --- upper incomplete Gamma ---------------------------------------------------
#
# Evaluated in 40-digit decimal arithmetic and rounded once: near a = 10 the
# function is ~3e5 and a 1e-10 absolute error is under two ulps in binary64.

_DEC = decimal.Context(prec=40, Emin=-999_999, Emax=999_999)
_DEC_EPS = decimal.Decimal("1e-38")
_DEC_TINY = decimal.Decimal("1e-400")
_PI = decimal.Decimal("3.14159265358979323846264338327950288419716939937510")
_BERNOULLI = [  # B_2 .. B_20
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
    Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
    Fraction(-174611, 330),
]
_STIRLING_SHIFT = 25


def _gamma_dec(a: decimal.Decimal) -> decimal.Decimal:
    """Gamma(a) from the Stirling series at a + n >= 25, shifted back down."""
    D = decimal.Decimal
    n = max(0, math.ceil(_STIRLING_SHIFT - a))
    z = a + n
    log_g = (z - D("0.5")) * z.ln() - z + (2 * _PI).ln() / 2
    zsq = z * z
    zpow = z
    for k, b in enumerate(_BERNOULLI, start=1):
        log_g += D(b.numerator) / (D(b.denominator) * (2 * k) * (2 * k - 1) * zpow)
        zpow *= zsq
    shift = D(1)
    for k in range(n):
        shift *= a + k
    return log_g.exp() / shift


def _prefactor(a: decimal.Decimal, x: decimal.Decimal) -> decimal.Decimal:
    return (a * x.ln() - x).exp()


def _lower_series(a: decimal.Decimal, x: decimal.Decimal) -> decimal.Decimal:
    """gamma(a, x) by its power series; converges fast for x < a + 1."""
    term = 1 / a
    total = term
    ap = a
    for _ in range(_MAX_TERMS):
        ap += 1
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _DEC_EPS:
            return total * _prefactor(a, x)
    raise ArithmeticError(f"series for gamma({a}, {x}) did not converge")


def _upper_fraction(a: decimal.Decimal, x: decimal.Decimal) -> decimal.Decimal:
    """Gamma(a, x) by its continued fraction (modified Lentz); x >= a + 1."""
    b = x + 1 - a
    c = 1 / _DEC_TINY
    d = 1 / b
    h = d
    for i in range(1, _MAX_TERMS):
        an = -i * (i - a)
        b += 2
        d = an * d + b
        if abs(d) < _DEC_TINY:
            d = _DEC_TINY
        c = b + an / c
        if abs(c) < _DEC_TINY:
            c = _DEC_TINY
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < _DEC_EPS:
            return h * _prefactor(a, x)
    raise ArithmeticError(f"continued fraction for Gamma({a}, {x}) did not converge")


def upper_incomplete_gamma(a: float, x: float) -> float:
    """``Gamma(a, x) = int_x^inf t**(a-1) e**(-t) dt`` (not regularized)."""
    if not (a > 0.0 and math.isfinite(a)):
        raise ValueError(f"a must be positive and finite, got {a!r}")
    if not x >= 0.0:
        raise ValueError(f"x must be nonnegative, got {x!r}")
    if math.isinf(x):
        return 0.0
    with decimal.localcontext(_DEC):
        da, dx = decimal.Decimal(a), decimal.Decimal(x)
        if x == 0.0:
            value = _gamma_dec(da)
        elif x < a + 1.0:
            value = _gamma_dec(da) - _lower_series(da, dx)
        else:
            value = _upper_fraction(da, dx)
        return float(value)


# --- novelty integrals --------------------------------------------------------


def tail_integral(decay: DecayLaw, t0: float) -> float:
    """``int_{t0}^inf exp(-alpha t**beta) dt`` in minutes, via Gamma."""
    if decay.alpha == 0.0:
        raise DivergentIntegralError("novelty never decays (alpha = 0): the tail integral diverges")
    if t0 < 0.0:
        raise ValueError(f"t0 must be nonnegative, got {t0!r}")
    inv = 1.0 / decay.beta
    return decay.alpha ** (-inv) / decay.beta * upper_incomplete_gamma(inv, decay.alpha * t0**decay.beta)


def tail_integral_quad(decay: DecayLaw, t0: float) -> float:
    """Same integral by adaptive quadrature after substituting ``u = t**beta``.

    Kept as an independent check on ``tail_integral``.
    """
    if decay.alpha == 0.0:
        raise DivergentIntegralError("novelty never decays (alpha = 0): the tail integral diverges")
    alpha, beta = decay.alpha, decay.beta
    inv = 1.0 / beta

    def integrand(u: float) -> float:
        if u == 0.0:
            return inv if beta == 1.0 else 0.0
        return inv * math.exp((inv - 1.0) * math.log(u) - alpha * u)

    # split at the integrand's mode so quad sees the peak
    lo = t0**beta
    mode = max(lo, (inv - 1.0) / alpha)
    head = integrate.quad(integrand, lo, mode, epsabs=0.0, epsrel=1e-12, limit=200)[0] if mode > lo else 0.0
    tail = integrate.quad(integrand, mode, math.inf, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    return head + tail


# --- log-performance and the critical equation --------------------------------


@dataclass(frozen=True)
class CriticalParams:
    abar: float = DIGG_MEAN_FACTOR
    slots: int = DIGG_SLOTS
    arrival_interval: float = 20.0
    horizon: float = 50_000.0

    def __post_init__(self):
        if not self.abar >= 0.0:
            raise ValueError(f"abar must be >= 0, got {self.abar!r}")
        if self.slots < 1:
            raise ValueError("slots must be >= 1")
        if not self.arrival_interval > 0.0:
            raise ValueError("arrival_interval must be positive")
        if not self.horizon >= self.page_cycle:
            raise ValueError(
                f"horizon {self.horizon} must be at least one page cycle ({self.page_cycle} minutes)"
            )

    @property
    def page_cycle(self) -> float:
        return self.slots * self.arrival_interval

    @property
    def log_cycles(self) -> float:
        """``log(T / (ms))``, the log-time left after one page cycle."""
        return math.log(self.horizon / self.page_cycle)


def expected_log_diggs_popularity(params: CriticalParams, decay: DecayLaw) -> float:
    return params.abar * tail_integral(decay, 0.0)


def expected_log_diggs_novelty(params: CriticalParams, decay: DecayLaw) -> float:
    within_cycle = tail_integral(decay, 0.0) - tail_integral(decay, params.page_cycle)
    return params.abar * within_cycle + params.log_cycles


def critical_residual(alpha: float, beta: float, params: CriticalParams) -> float:
    """Novelty left after one page cycle minus log-time left.

    Positive: order by popularity. Negative: order by novelty.
    """
    decay = DecayLaw(alpha, beta)
    if alpha == 0.0:
        raise DivergentIntegralError("critical residual undefined for alpha = 0")
    return params.abar * tail_integral(decay, params.page_cycle) - params.log_cycles


def bisect_root(
    f: Callable[[float], float], lo: float, hi: float, xtol: float, ftol: float, max_iter: int = 500
) -> float:
    """Bisection until the bracket is narrower than ``xtol`` and ``|f| < ftol``
    at the midpoint. Endpoint values must have opposite signs."""
    f_lo = f(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0 or (hi - lo < xtol and abs(f_mid) < ftol):
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= 4 * _EPS * max(abs(lo), abs(hi)):
            return mid
    raise ArithmeticError("bisection did not converge")


def critical_beta(
    alpha: float, params: CriticalParams, bracket: tuple[float, float] = (0.1, 1.0)
) -> float:
    """Decay exponent on the critical curve at ``alpha``."""
    lo, hi = bracket
    if not 0.0 < lo < hi <= 1.0:
        raise ValueError(f"bracket must satisfy 0 < lo < hi <= 1, got {bracket}")
    res_lo = critical_residual(alpha, lo, params)
    res_hi = critical_residual(alpha, hi, params)
    if res_lo == 0.0:
        return lo
    if res_hi == 0.0:
        return hi
    if (res_lo > 0.0) == (res_hi > 0.0):
        raise NoRootError(alpha, lo, hi, res_lo, res_hi)
    ftol = 1e-6 * abs(params.log_cycles)
    return bisect_root(lambda b: critical_residual(alpha, b, params), lo, hi, xtol=1e-6, ftol=ftol)


# --- phase diagram -------------------------------------------------------------


class Region(enum.Enum):
    NOVELTY_FIRST = "NoveltyFirst"
    POPULARITY_FIRST = "PopularityFirst"
    CRITICAL = "Critical"


def classify(residual: float, tolerance: float = CRITICAL_TOLERANCE) -> Region:
    if abs(residual) < tolerance:
        return Region.CRITICAL
    return Region.POPULARITY_FIRST if residual > 0.0 else Region.NOVELTY_FIRST


@dataclass(frozen=True)
class PhasePoint:
    alpha: float
    beta: float
    residual: float
    region: Region

    @classmethod
    def at(cls, alpha: float, beta: float, params: CriticalParams) -> "PhasePoint":
        res = critical_residual(alpha, beta, params)
        return cls(alpha, beta, res, classify(res))


@dataclass
class PhaseDiagram:
    curve: list[tuple[float, float]] = field(default_factory=list)
    points: list[PhasePoint] = field(default_factory=list)
    failures: dict[float, str] = field(default_factory=dict)


def phase_diagram(
    alpha_grid: Sequence[float],
    params: CriticalParams,
    beta_grid: Sequence[float] | None = None,
    bracket: tuple[float, float] = (0.1, 1.0),
) -> PhaseDiagram:
    """Critical curve over ``alpha_grid`` plus region labels on the
    ``alpha_grid x beta_grid`` lattice. Alphas where no root lies in
    ``bracket`` are left off the curve and listed in ``failures``."""
    if not alpha_grid:
        raise ValueError("alpha grid must be nonempty")
    out = PhaseDiagram()
    for alpha in alpha_grid:
        try:
            out.curve.append((alpha, critical_beta(alpha, params, bracket)))
        except NoRootError as exc:
            out.failures[alpha] = str(exc)
        for beta in beta_grid or ():
            out.points.append(PhasePoint.at(alpha, beta, params))
    return out


def write_curve_csv(diagram: PhaseDiagram, fh: io.TextIOBase) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["alpha", "beta_critical"])
    for alpha, beta in diagram.curve:
        w.writerow([repr(alpha), repr(beta)])


def write_points_csv(diagram: PhaseDiagram, fh: io.TextIOBase) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["alpha", "beta", "residual", "region"])
    for p in diagram.points:
        w.writerow([repr(p.alpha), repr(p.beta), repr(p.residual), p.region.value])
