"""
Local search: steepest-descent LS1, its adaptive multi-start ALS1, the
randomised flip/swap search RLS12 and its adaptive multi-start ARLS12.

LS1 also has a plain multi-start form that samples every start with
ps = 1/2.
"""

import itertools
import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from mincond.core.budget import SearchBudget, SearchContext, require_stopping_rule
from mincond.core.engine import BITS_DTYPE, PartitionState, argmin_ratio, init_from_bits
from mincond.core.errors import InvalidConfig
from mincond.core.graph import Graph

logger = logging.getLogger(__name__)

INITIAL_PS = 0.5
DEFAULT_MOVE_MIX = 0.5
MAX_RESAMPLES = 8


@dataclass(frozen=True)
class SamplerConfig:
    """Probability ``ps`` of a 1-bit in a sampled start, halved down to ``ps_floor``."""

    ps: float = INITIAL_PS
    ps_floor: float = 0.0

    def __post_init__(self):
        if not 0 < self.ps <= 1:
            raise InvalidConfig(f"ps must be in (0, 1], got {self.ps}")
        if not 0 <= self.ps_floor <= self.ps:
            raise InvalidConfig(f"ps floor must be in [0, ps], got {self.ps_floor}")

    @classmethod
    def for_graph(cls, graph: Graph, ps_floor: Optional[float] = None) -> "SamplerConfig":
        if ps_floor is None:
            # one expected 1-bit
            ps_floor = min(INITIAL_PS, 2 / graph.n)
        return cls(ps=INITIAL_PS, ps_floor=ps_floor)

    def halved(self) -> "SamplerConfig":
        return replace(self, ps=max(self.ps / 2, self.ps_floor))

    def reset(self) -> "SamplerConfig":
        return replace(self, ps=max(INITIAL_PS, self.ps_floor))


def sample_random_membership(graph: Graph, ps: float, rng: np.random.Generator) -> np.ndarray:
    """
    Sets each bit to 1 with probability ``ps``.

    An all-0 or all-1 draw is resampled a few times; if it persists, one
    random bit is forced to 1 and another to 0.
    """
    n = graph.n
    for _ in range(MAX_RESAMPLES):
        bits = (rng.random(n) < ps).astype(BITS_DTYPE)
        ones = int(bits.sum())
        if 0 < ones < n:
            return bits
    i = int(rng.integers(n))
    j = (i + 1 + int(rng.integers(n - 1))) % n
    bits[i] = 1
    bits[j] = 0
    return bits


def ls1_descend(state: PartitionState, context: Optional[SearchContext] = None,
                interruptible: bool = True) -> PartitionState:
    """
    Steepest descent over single flips.

    Each step scans all n flips, skips those emptying a side and applies the
    strictly best one, smallest vertex id on ties. Stops at a flip-local
    optimum, or earlier when ``context`` runs out and ``interruptible`` is set.
    """
    n = state.graph.n
    while True:
        if interruptible and context is not None and context.expired():
            break
        new_cut, new_den = state.scan_flips()
        if context is not None:
            context.spend(n)
        improving = (new_den > 0) & (new_cut * min(state.vol_s, state.vol_comp) < state.cut * new_den)
        if not improving.any():
            break
        candidates = np.flatnonzero(improving)
        state.apply_flip(candidates[argmin_ratio(new_cut[candidates], new_den[candidates])])
    return state


def is_flip_local_optimum(state: PartitionState) -> bool:
    new_cut, new_den = state.scan_flips()
    improving = (new_den > 0) & (new_cut * min(state.vol_s, state.vol_comp) < state.cut * new_den)
    return not improving.any()


def _descend_from_sample(graph: Graph, ps: float, context: SearchContext, interruptible: bool) -> PartitionState:
    bits = sample_random_membership(graph, ps, context.rng)
    return ls1_descend(init_from_bits(graph, bits), context, interruptible)


def ls1_run(graph: Graph, budget: SearchBudget, context: Optional[SearchContext] = None) -> PartitionState:
    """LS1 restarted from a ps = 1/2 sample whenever it reaches a local optimum."""
    require_stopping_rule(budget)
    context = context or budget.start()
    best = None
    while best is None or not context.expired():
        state = _descend_from_sample(graph, INITIAL_PS, context, interruptible=best is not None)
        if best is not None:
            context.restarts += 1
        if best is None or state.phi() < best.phi():
            best = state
    return best


def als1_run(graph: Graph, budget: SearchBudget, context: Optional[SearchContext] = None,
             sampler: Optional[SamplerConfig] = None) -> PartitionState:
    """
    Adaptive multi-start LS1.

    A descent that matches or beats the best so far halves ps; any other
    descent resets ps to 1/2. At least one full descent runs, whatever the
    budget.
    """
    require_stopping_rule(budget)
    context = context or budget.start()
    sampler = sampler or SamplerConfig.for_graph(graph)
    best = None
    while best is None or not context.expired():
        state = _descend_from_sample(graph, sampler.ps, context, interruptible=best is not None)
        if best is not None:
            context.restarts += 1
        if best is None or state.phi() <= best.phi():
            best = state
            sampler = sampler.halved()
        else:
            sampler = sampler.reset()
        logger.debug("als1: descent %s, best %s, next ps %g", state.phi(), best.phi(), sampler.ps)
    return best


def rls12_walk(state: PartitionState, rng: np.random.Generator, iterations: Optional[int] = None,
               context: Optional[SearchContext] = None, move_mix: float = DEFAULT_MOVE_MIX,
               stagnation_limit: Optional[int] = None) -> tuple[int, bool]:
    """
    Randomised search over flips and swaps, mutating ``state``.

    Each iteration tests a uniformly random flip with probability
    ``move_mix``, otherwise a uniformly random swap of a vertex in S with one
    outside. A move is accepted when it keeps both sides non-empty and does
    not increase the conductance.

    Returns:
        Iterations performed and whether ``stagnation_limit`` consecutive
        iterations went by without a strict improvement.
    """
    n = state.graph.n
    cur_cut, cur_den = state.cut, min(state.vol_s, state.vol_comp)
    since_improvement = 0
    done = 0
    steps = itertools.count() if iterations is None else range(iterations)
    for _ in steps:
        if context is not None and context.expired():
            break
        flip = state.size_s in (0, n) or rng.random() < move_mix
        if flip:
            delta = state.eval_flip(int(rng.integers(n)))
        else:
            delta = state.eval_swap(state.sample_in_s(rng), state.sample_out_s(rng))
        if context is not None:
            context.spend()
        done += 1

        new_den = min(delta.new_vol_s, delta.new_vol_comp)
        left, right = delta.new_cut * cur_den, cur_cut * new_den
        if new_den > 0 and left <= right:
            if flip:
                state.apply_flip(delta.vertex)
            else:
                state.apply_swap(*delta.vertex)
            since_improvement = 0 if left < right else since_improvement + 1
            cur_cut, cur_den = delta.new_cut, new_den
        else:
            since_improvement += 1

        if stagnation_limit is not None and since_improvement >= stagnation_limit:
            return done, True
    return done, False


def rls12_run(state: PartitionState, iterations: int, rng: np.random.Generator,
              context: Optional[SearchContext] = None, move_mix: float = DEFAULT_MOVE_MIX) -> PartitionState:
    rls12_walk(state, rng, iterations, context, move_mix)
    return state


def arls12_run(graph: Graph, budget: SearchBudget, context: Optional[SearchContext] = None,
               move_mix: float = DEFAULT_MOVE_MIX, sampler: Optional[SamplerConfig] = None) -> PartitionState:
    """
    Multi-start RLS12. A start ends after ``budget.stagnation_limit``
    iterations without strict improvement; starts are sampled with the ALS1
    ps schedule.
    """
    require_stopping_rule(budget)
    context = context or budget.start()
    sampler = sampler or SamplerConfig.for_graph(graph)
    best = None
    while best is None or not context.expired():
        if best is not None:
            context.restarts += 1
        state = init_from_bits(graph, sample_random_membership(graph, sampler.ps, context.rng))
        context.spend()
        rls12_walk(state, context.rng, None, context, move_mix, budget.stagnation_limit)
        if best is None or state.phi() <= best.phi():
            best = state
            sampler = sampler.halved()
        else:
            sampler = sampler.reset()
        logger.debug("arls12: start ended at %s, best %s, next ps %g", state.phi(), best.phi(), sampler.ps)
    return best
