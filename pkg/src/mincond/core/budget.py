import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from mincond.core.errors import InvalidConfig

DEFAULT_STAGNATION_LIMIT = 10**6


@dataclass(frozen=True)
class SearchBudget:
    """
    Stopping rule of one run.

    ``time_limit`` is the wall-clock mode; ``max_evaluations`` is the
    deterministic mode used by regression tests. When both are set the
    first one reached stops the run.
    """

    time_limit: Optional[float] = None
    max_evaluations: Optional[int] = None
    stagnation_limit: int = DEFAULT_STAGNATION_LIMIT
    seed: int = 0

    def __post_init__(self):
        if self.time_limit is not None and self.time_limit < 0:
            raise InvalidConfig(f"time limit must be >= 0, got {self.time_limit}")
        if self.max_evaluations is not None and self.max_evaluations < 0:
            raise InvalidConfig(f"evaluation budget must be >= 0, got {self.max_evaluations}")
        if self.stagnation_limit < 1:
            raise InvalidConfig(f"stagnation limit must be >= 1, got {self.stagnation_limit}")

    def start(self) -> "SearchContext":
        return SearchContext(budget=self, rng=np.random.default_rng(self.seed))


@dataclass
class SearchContext:
    """Runtime side of a :class:`SearchBudget`: RNG stream, clock and counters."""

    budget: SearchBudget
    rng: np.random.Generator
    started_at: float = field(default_factory=time.perf_counter)
    evaluations: int = 0
    restarts: int = 0
    generations: int = 0
    seeding_overrun: bool = False

    def spend(self, evaluations: int = 1) -> None:
        self.evaluations += evaluations

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.started_at

    def expired(self) -> bool:
        limit = self.budget.max_evaluations
        if limit is not None and self.evaluations >= limit:
            return True
        return self.budget.time_limit is not None and self.elapsed >= self.budget.time_limit


def require_stopping_rule(budget: SearchBudget) -> None:
    if budget.time_limit is None and budget.max_evaluations is None:
        raise InvalidConfig("multi-start search needs a time limit or an evaluation budget")
