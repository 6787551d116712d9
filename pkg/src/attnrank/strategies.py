"""Index strategies and the page ordering they induce.

Each strategy maps a story state ``(N_t, t)`` to a scalar index. Stories
are shown in descending index order; when the page overflows the story
with the smallest index is dropped.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .model import DecayLaw, StoryState, novelty

DEFAULT_WEIGHT = 0.6

# (diggs, lifetime, novelty factor) -> index
Scorer = Callable[[float, float, float], float]


class Kind(enum.Enum):
    NOVELTY = "novelty"
    POPULARITY = "popularity"
    GREEDY = "greedy"
    WEIGHTED = "weighted"


@dataclass(frozen=True)
class IndexStrategy:
    kind: Kind
    weight: float = DEFAULT_WEIGHT

    def __post_init__(self):
        if self.kind is Kind.WEIGHTED and not self.weight > 0.0:
            raise ValueError(f"weighted strategy needs weight > 0, got {self.weight!r}")

    @classmethod
    def parse(cls, name: str) -> "IndexStrategy":
        """Parse ``novelty``, ``popularity``, ``greedy`` or ``weighted[:w]``."""
        head, _, arg = name.strip().lower().partition(":")
        try:
            kind = Kind(head)
        except ValueError:
            raise ValueError(
                f"unknown strategy {name!r}; expected novelty, popularity, greedy or weighted:<w>"
            ) from None
        if kind is Kind.WEIGHTED:
            return cls(kind, float(arg) if arg else DEFAULT_WEIGHT)
        if arg:
            raise ValueError(f"strategy {head!r} takes no parameter")
        return cls(kind)

    @property
    def name(self) -> str:
        if self.kind is Kind.WEIGHTED:
            return f"weighted:{self.weight!r}"
        return self.kind.value

    def __str__(self) -> str:
        return self.name

    def scorer(self, decay: DecayLaw) -> Scorer:
        """Index as a function of ``(diggs, lifetime, r)`` with ``r`` the
        novelty factor at ``lifetime``, already evaluated by the caller."""
        kind = self.kind
        if kind is Kind.NOVELTY:
            return lambda n, t, r: -t
        if kind is Kind.POPULARITY:
            return lambda n, t, r: n
        if kind is Kind.GREEDY:
            return lambda n, t, r: n * r
        w, alpha, beta = self.weight, decay.alpha, decay.beta
        if alpha == 0.0:
            return lambda n, t, r: w * math.log(n)
        # log r written out so very old stories do not underflow to log(0)
        return lambda n, t, r: w * math.log(n) - alpha * t**beta


NOVELTY = IndexStrategy(Kind.NOVELTY)
POPULARITY = IndexStrategy(Kind.POPULARITY)
GREEDY = IndexStrategy(Kind.GREEDY)
WEIGHTED = IndexStrategy(Kind.WEIGHTED)


def index_value(strategy: IndexStrategy, story: StoryState, decay: DecayLaw, now: float) -> float:
    t = story.lifetime(now)
    if not story.diggs > 0.0:
        raise ValueError(f"story {story.id} has nonpositive diggs")
    return strategy.scorer(decay)(story.diggs, t, novelty(decay, t))


def _keys(stories: Sequence[StoryState], strategy, decay, now):
    score = strategy.scorer(decay)
    keys = {}
    for s in stories:
        if s.id in keys:
            raise ValueError(f"duplicate story id {s.id}")
        t = s.lifetime(now)
        keys[s.id] = (score(s.diggs, t, novelty(decay, t)), s.id)
    return keys


def rank(
    stories: Sequence[StoryState], strategy: IndexStrategy, decay: DecayLaw, now: float
) -> list[StoryState]:
    """Top of page first. Equal indices put the more recently created story
    (larger id) first."""
    if not stories:
        raise ValueError("cannot rank an empty page")
    keys = _keys(stories, strategy, decay, now)
    return sorted(stories, key=lambda s: keys[s.id], reverse=True)


def evict_lowest(
    stories: Sequence[StoryState], strategy: IndexStrategy, decay: DecayLaw, now: float
) -> int:
    """Id of the story to drop; equal indices drop the oldest (smallest id)."""
    if not stories:
        raise ValueError("cannot evict from an empty page")
    keys = _keys(stories, strategy, decay, now)
    return min(keys.values())[1]
