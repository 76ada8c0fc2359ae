"""
Steady-state adaptive memetic algorithm (StS AMA).

The population holds LS1-local optima only. Every member is seeded by an
adaptive run of LS1 over shrinking ps; each generation recombines two
distinct tournament winners with one-point crossover and intensifies both
offspring with RLS12 followed by LS1 before they may replace the worst
members.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mincond.core.budget import SearchBudget, SearchContext, require_stopping_rule
from mincond.core.engine import init_from_bits
from mincond.core.errors import InvalidConfig, SeedingExceededBudget
from mincond.core.genetic import (
    DEFAULT_POP_SIZE,
    DEFAULT_TOURNAMENT_SIZE,
    Individual,
    Population,
    one_point_crossover,
    tournament_index,
)
from mincond.core.graph import Graph
from mincond.core.local_search import (
    DEFAULT_MOVE_MIX,
    SamplerConfig,
    is_flip_local_optimum,
    ls1_descend,
    rls12_walk,
    sample_random_membership,
)

logger = logging.getLogger(__name__)

DEFAULT_LS_LENGTH = 10**6
SEEDING_RETRIES = 3
PARENT_RETRIES = 16


@dataclass(frozen=True)
class AmaConfig:
    p: int = DEFAULT_POP_SIZE
    t: int = DEFAULT_TOURNAMENT_SIZE
    l: int = DEFAULT_LS_LENGTH
    move_mix: float = DEFAULT_MOVE_MIX
    complement_aware: bool = True
    ps_floor: Optional[float] = None

    def __post_init__(self):
        if self.p < 2:
            raise InvalidConfig(f"population size must be >= 2, got {self.p}")
        if self.t < 1:
            raise InvalidConfig(f"tournament size must be >= 1, got {self.t}")
        if self.l < 0:
            raise InvalidConfig(f"local search length must be >= 0, got {self.l}")
        if not 0 <= self.move_mix <= 1:
            raise InvalidConfig(f"move mix must be in [0, 1], got {self.move_mix}")


def adaptive_seed_individual(graph: Graph, rng: np.random.Generator, context: Optional[SearchContext] = None,
                             sampler: Optional[SamplerConfig] = None) -> Individual:
    """
    Samples with ps = 1/2, 1/4, ... and descends each sample with LS1 for as
    long as the new local optimum is at least as good as the best before it,
    at most ceil(log2 n) times. Returns the best local optimum met.
    """
    sampler = sampler or SamplerConfig.for_graph(graph)
    best = None
    for _ in range(max(1, math.ceil(math.log2(graph.n)))):
        state = init_from_bits(graph, sample_random_membership(graph, sampler.ps, rng))
        ls1_descend(state, context, interruptible=False)
        sampler = sampler.halved()
        if best is not None and state.phi() > best.phi():
            break
        best = state
    return Individual.from_state(best)


def replace_worst_if_novel(pop: Population, offspring: Individual, complement_aware: bool = True) -> bool:
    """
    Installs ``offspring`` over the worst member (largest index on ties)
    unless its genotype, or with ``complement_aware`` its complement, is
    already present.
    """
    if pop.contains(offspring.genotype, complement_aware):
        return False
    pop.members[pop.worst_index()] = offspring
    pop.record(offspring)
    return True


def _seed_population(graph: Graph, cfg: AmaConfig, context: SearchContext) -> Population:
    sampler = SamplerConfig.for_graph(graph, cfg.ps_floor)
    members: list[Individual] = []
    for _ in range(cfg.p):
        for _ in range(SEEDING_RETRIES + 1):
            candidate = adaptive_seed_individual(graph, context.rng, context, sampler)
            if not Population.holds(members, candidate.genotype, cfg.complement_aware):
                break
        members.append(candidate)
    return Population(members)


def _pick_parents(pop: Population, t: int, rng: np.random.Generator) -> tuple[int, int]:
    first = tournament_index(pop, t, rng)
    for _ in range(PARENT_RETRIES):
        second = tournament_index(pop, t, rng)
        if second != first:
            return first, second
    return first, (first + 1 + int(rng.integers(len(pop) - 1))) % len(pop)


def sts_ama_run(graph: Graph, cfg: AmaConfig, budget: SearchBudget,
                context: Optional[SearchContext] = None) -> Individual:
    """
    Runs StS AMA until the budget is spent.

    Seeding always completes. If it leaves no budget, evolution is skipped,
    ``context.seeding_overrun`` is set and SeedingExceededBudget is warned.
    """
    require_stopping_rule(budget)
    context = context or budget.start()
    rng = context.rng
    pop = _seed_population(graph, cfg, context)
    logger.debug("sts-ama: seeded %d members, best %s", len(pop), pop.best().fitness)

    if context.expired():
        context.seeding_overrun = True
        message = f"{graph.name}: seeding took {context.elapsed:.1f}s, evolution skipped"
        logger.warning(message)
        warnings.warn(message, SeedingExceededBudget, stacklevel=2)
        return pop.best()

    while not context.expired():
        first, second = _pick_parents(pop, cfg.t, rng)
        for bits in one_point_crossover(pop.members[first].genotype, pop.members[second].genotype, rng):
            state = init_from_bits(graph, bits)
            context.spend()
            rls12_walk(state, rng, cfg.l, context, cfg.move_mix)
            ls1_descend(state, context, interruptible=False)
            offspring = Individual.from_state(state)
            if replace_worst_if_novel(pop, offspring, cfg.complement_aware) and logger.isEnabledFor(logging.DEBUG):
                assert is_flip_local_optimum(state)
        context.generations += 1
    return pop.best()
