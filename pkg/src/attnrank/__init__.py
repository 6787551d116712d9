"""Ranking strategies for collective attention on a dynamic front page.

Simulates multiplicative click growth under novelty decay and slot
attenuation, compares index orderings (novelty, popularity, one-step
greedy, weighted log), predicts the novelty/popularity phase boundary in
closed form and fits decay and slot parameters to click logs.
"""

from .analytics import (
    CriticalParams,
    PhaseDiagram,
    PhasePoint,
    Region,
    critical_beta,
    critical_residual,
    expected_log_diggs_novelty,
    expected_log_diggs_popularity,
    phase_diagram,
    tail_integral,
    upper_incomplete_gamma,
)
from .estimation import FitResult, SamplePoint, fit_decay, fit_position_factor, load_samples
from .model import DecayLaw, NoiseLaw, PositionProfile, StoryState, digg_profile, novelty
from .simulator import RunSummary, SimConfig, relative_performance, run, sweep
from .strategies import GREEDY, NOVELTY, POPULARITY, WEIGHTED, IndexStrategy, Kind

__all__ = [
    "CriticalParams", "PhaseDiagram", "PhasePoint", "Region", "critical_beta", "critical_residual",
    "expected_log_diggs_novelty", "expected_log_diggs_popularity", "phase_diagram", "tail_integral",
    "upper_incomplete_gamma", "FitResult", "SamplePoint", "fit_decay", "fit_position_factor",
    "load_samples", "DecayLaw", "NoiseLaw", "PositionProfile", "StoryState", "digg_profile",
    "novelty", "RunSummary", "SimConfig", "relative_performance", "run", "sweep", "GREEDY",
    "NOVELTY", "POPULARITY", "WEIGHTED", "IndexStrategy", "Kind",
]
