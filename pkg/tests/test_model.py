import io
import math

import pytest
from hypothesis import given, strategies as st

from attnrank.model import (
    DecayLaw,
    NoiseLaw,
    PositionProfile,
    StoryState,
    digg_profile,
    growth_increment,
    log_growth_rate,
    novelty,
)

alphas = st.floats(0.01, 2.0)
betas = st.floats(0.05, 1.0)
times = st.floats(0.0, 1e4)


@pytest.mark.parametrize(
    "alpha, beta, t, expected",
    [
        (0.4, 0.4, 0.0, 1.0),
        (0.4, 1.0, 1.0, math.exp(-0.4)),
        (0.0, 0.5, 100.0, 1.0),
    ],
)
def test_novelty_examples(alpha, beta, t, expected):
    assert novelty(DecayLaw(alpha, beta), t) == pytest.approx(expected, rel=1e-15)


def test_novelty_closed_form_value():
    assert novelty(DecayLaw(0.4, 1.0), 1.0) == pytest.approx(0.670320, abs=5e-7)


def test_novelty_rejects_negative_time():
    with pytest.raises(ValueError):
        novelty(DecayLaw(), -1.0)


@pytest.mark.parametrize("alpha, beta", [(-0.1, 0.5), (0.4, 0.0), (0.4, 1.5), (math.nan, 0.4)])
def test_decay_law_validation(alpha, beta):
    with pytest.raises(ValueError):
        DecayLaw(alpha, beta)


@given(alphas, betas, times)
def test_novelty_in_unit_interval_and_strictly_decreasing(alpha, beta, t):
    d = DecayLaw(alpha, beta)
    r1, r2 = novelty(d, t), novelty(d, t + 1.0)
    assert 0.0 <= r2 <= r1 <= 1.0
    if r1 > 0.0:
        assert r1 > r2


@given(alphas, st.floats(0.05, 0.95), st.floats(1.01, 1e4))
def test_larger_beta_decays_faster(alpha, beta, t):
    slow, fast = DecayLaw(alpha, beta), DecayLaw(alpha, min(1.0, beta + 0.05))
    assert novelty(fast, t) <= novelty(slow, t)


@given(betas, times)
def test_zero_alpha_never_decays(beta, t):
    assert novelty(DecayLaw(0.0, beta), t) == 1.0


@pytest.mark.parametrize(
    "n, a, r, x, dt, expected",
    [
        (100, 0.12, 1.0, 1.0, 5.0, 60.0),
        (100, 0.12, 0.5, 0.0, 5.0, 0.0),
        (1, 0.08, 1.0, 2.0, 5.0, 0.8),
    ],
)
def test_growth_increment_examples(n, a, r, x, dt, expected):
    assert growth_increment(n, a, r, x, dt) == pytest.approx(expected, rel=1e-14)


def test_growth_increment_negative_draw():
    assert growth_increment(10.0, 0.1, 1.0, -0.5, 5.0) == pytest.approx(-2.5)


@pytest.mark.parametrize("n, dt", [(0.0, 5.0), (-1.0, 5.0), (1.0, 0.0)])
def test_growth_increment_preconditions(n, dt):
    with pytest.raises(ValueError):
        growth_increment(n, 0.1, 1.0, 1.0, dt)


@given(
    st.floats(0.1, 1e6), st.floats(0.01, 0.2), st.floats(0.0, 1.0),
    st.floats(-2.0, 3.0), st.floats(0.5, 10.0), st.integers(0, 4),
)
def test_growth_increment_linear_in_each_argument(n, a, r, x, dt, which):
    args = [n, a, r, x, dt]
    base = growth_increment(*args)
    args[which] *= 2.0
    assert growth_increment(*args) == pytest.approx(2.0 * base, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize(
    "before, after, dt, expected",
    [
        (100.0, 100.0, 5.0, 0.0),
        (100.0, 110.0, 5.0, math.log(1.1) / 5.0),
        (1.0, math.exp(5.0), 5.0, 1.0),
    ],
)
def test_log_growth_rate_examples(before, after, dt, expected):
    assert log_growth_rate(before, after, dt) == pytest.approx(expected, rel=1e-14, abs=1e-15)


def test_log_growth_rate_reference_value():
    assert log_growth_rate(100, 110, 5) == pytest.approx(0.0190620, abs=5e-8)


@pytest.mark.parametrize("before, after", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0)])
def test_log_growth_rate_rejects_nonpositive(before, after):
    with pytest.raises(ValueError):
        log_growth_rate(before, after, 5.0)


@given(st.floats(1e-3, 1e6), st.floats(-1.0, 1.0), st.floats(0.5, 10.0))
def test_log_growth_rate_inverts_exponential_growth(n, s, dt):
    assert abs(log_growth_rate(n, n * math.exp(s * dt), dt) - s) < 1e-12


def test_noise_law_mean_is_one():
    assert NoiseLaw().mean == 1.0
    assert NoiseLaw(0.0).std == 0.0
    with pytest.raises(ValueError):
        NoiseLaw(-0.1)


class TestPositionProfile:
    def test_abar_recomputed(self):
        p = PositionProfile((0.3, 0.2, 0.1))
        assert p.abar == pytest.approx(0.2)
        assert len(p) == 3

    @pytest.mark.parametrize("factors", [(), (0.1, 0.0), (0.1, 0.2), (0.1, -0.05)])
    def test_invalid(self, factors):
        with pytest.raises(ValueError):
            PositionProfile(factors)

    def test_digg_default_matches_calibration(self):
        p = digg_profile()
        assert len(p) == 15
        assert p.factors[0] == pytest.approx(0.120, abs=1e-12)
        assert p.factors[1] == pytest.approx(0.106, abs=1e-12)
        assert p.abar == pytest.approx(0.08, abs=1e-12)
        assert all(a >= b for a, b in zip(p.factors, p.factors[1:]))

    def test_digg_default_geometric_form(self):
        a = digg_profile().factors
        # a_i = u + v rho^(i-1)  =>  successive gaps shrink by a constant ratio
        gaps = [x - y for x, y in zip(a, a[1:])]
        ratios = [g2 / g1 for g1, g2 in zip(gaps, gaps[1:])]
        assert max(ratios) - min(ratios) < 1e-9
        assert 0.0 < ratios[0] < 1.0

    @pytest.mark.parametrize("slots", [1, 2])
    def test_short_pages_fall_back(self, slots):
        p = digg_profile(slots)
        assert len(p) == slots
        assert p.abar == pytest.approx(0.08)
        assert min(p.factors) > 0.0

    def test_csv_roundtrip(self):
        p = digg_profile()
        assert PositionProfile.from_csv(io.StringIO(p.to_csv())) == p

    def test_csv_accepts_shuffled_rows(self):
        text = "position,factor\n2,0.1\n1,0.2\n"
        assert PositionProfile.from_csv(io.StringIO(text)).factors == (0.2, 0.1)

    @pytest.mark.parametrize(
        "text",
        [
            "slot,factor\n1,0.1\n",
            "position,factor\n1,0.2\n3,0.1\n",
            "position,factor\n1,abc\n",
            "position,factor\n1,0.1\n2,0.2\n",
        ],
    )
    def test_csv_rejects(self, text):
        with pytest.raises(ValueError):
            PositionProfile.from_csv(io.StringIO(text))


def test_story_lifetime():
    s = StoryState(3, 1.0, 10.0)
    assert s.lifetime(25.0) == 15.0
    with pytest.raises(ValueError):
        s.lifetime(5.0)
