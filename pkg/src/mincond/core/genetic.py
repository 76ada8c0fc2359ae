"""
Generational genetic algorithms AGA-1PX and AGA-UX, and the bit-string
operators they share with the memetic algorithm.

Operators work on genotypes (uint8 arrays of length n) and never return an
all-0 or all-1 string: such a result gets one random bit flipped.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from mincond.core.budget import SearchBudget, SearchContext, require_stopping_rule
from mincond.core.engine import BITS_DTYPE, ConductanceValue, PartitionState, evaluate_bits
from mincond.core.errors import InvalidConfig
from mincond.core.graph import Graph
from mincond.core.local_search import SamplerConfig, sample_random_membership

logger = logging.getLogger(__name__)

DEFAULT_POP_SIZE = 100
DEFAULT_TOURNAMENT_SIZE = 2


@dataclass
class Individual:
    genotype: np.ndarray
    fitness: ConductanceValue

    @classmethod
    def from_bits(cls, graph: Graph, bits: np.ndarray, context: Optional[SearchContext] = None) -> "Individual":
        if context is not None:
            context.spend()
        return cls(bits, evaluate_bits(graph, bits))

    @classmethod
    def from_state(cls, state: PartitionState) -> "Individual":
        return cls(state.bits(), state.phi())


@dataclass
class Population:
    members: list[Individual]
    best_ever: Individual = field(init=False)

    def __post_init__(self):
        self.best_ever = self.best()

    def __len__(self) -> int:
        return len(self.members)

    def best(self) -> Individual:
        return min(self.members, key=lambda ind: ind.fitness)

    def worst_index(self) -> int:
        worst = 0
        for i, ind in enumerate(self.members):
            if ind.fitness >= self.members[worst].fitness:
                worst = i
        return worst

    def record(self, candidate: Individual) -> bool:
        """Updates ``best_ever``; True on strict improvement."""
        if candidate.fitness < self.best_ever.fitness:
            self.best_ever = candidate
            return True
        return False

    def contains(self, genotype: np.ndarray, complement_aware: bool = True) -> bool:
        return self.holds(self.members, genotype, complement_aware)

    @staticmethod
    def holds(members: list[Individual], genotype: np.ndarray, complement_aware: bool = True) -> bool:
        """Exact genotype match, or complement match when ``complement_aware``."""
        for ind in members:
            if np.array_equal(ind.genotype, genotype):
                return True
            if complement_aware and np.array_equal(ind.genotype, 1 - genotype):
                return True
        return False


@dataclass(frozen=True)
class GaConfig:
    p: int = DEFAULT_POP_SIZE
    t: int = DEFAULT_TOURNAMENT_SIZE
    mutation_rate: Optional[float] = None
    ps_floor: Optional[float] = None

    def __post_init__(self):
        if self.p < 2 or self.p % 2:
            raise InvalidConfig(f"population size must be even and >= 2, got {self.p}")
        if not 1 <= self.t <= self.p:
            raise InvalidConfig(f"tournament size must be in [1, {self.p}], got {self.t}")
        if self.mutation_rate is not None and not 0 <= self.mutation_rate <= 1:
            raise InvalidConfig(f"mutation rate must be in [0, 1], got {self.mutation_rate}")


def repair(bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    ones = int(bits.sum())
    if ones == 0 or ones == len(bits):
        i = int(rng.integers(len(bits)))
        bits[i] ^= 1
    return bits


def tournament_index(pop: Population, t: int, rng: np.random.Generator) -> int:
    """Index of the fittest of ``t`` members drawn with replacement; the first drawn wins ties."""
    drawn = rng.integers(0, len(pop), size=t)
    winner = int(drawn[0])
    for i in drawn[1:]:
        if pop.members[i].fitness < pop.members[winner].fitness:
            winner = int(i)
    return winner


def tournament_select(pop: Population, t: int, rng: np.random.Generator) -> Individual:
    return pop.members[tournament_index(pop, t, rng)]


def one_point_crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator,
                        point: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Cut point k uniform in 1..n-1: a[:k] + b[k:] and b[:k] + a[k:]."""
    k = int(rng.integers(1, len(a))) if point is None else point
    first = np.concatenate([a[:k], b[k:]])
    second = np.concatenate([b[:k], a[k:]])
    return repair(first, rng), repair(second, rng)


def uniform_crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    mask = rng.random(len(a)) < 0.5
    return repair(np.where(mask, a, b).astype(BITS_DTYPE), rng)


def mutate(bits: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    flips = (rng.random(len(bits)) < rate).astype(BITS_DTYPE)
    return repair(bits ^ flips, rng)


def _one_point_offspring(pop: Population, cfg: GaConfig, rate: float, rng: np.random.Generator) -> list[np.ndarray]:
    children = []
    for _ in range(cfg.p // 2):
        a = tournament_select(pop, cfg.t, rng)
        b = tournament_select(pop, cfg.t, rng)
        first, second = one_point_crossover(a.genotype, b.genotype, rng)
        children.append(mutate(first, rate, rng))
        children.append(mutate(second, rate, rng))
    return children


def _uniform_offspring(pop: Population, cfg: GaConfig, rate: float, rng: np.random.Generator) -> list[np.ndarray]:
    children = []
    for _ in range(cfg.p):
        a = tournament_select(pop, cfg.t, rng)
        b = tournament_select(pop, cfg.t, rng)
        children.append(mutate(uniform_crossover(a.genotype, b.genotype, rng), rate, rng))
    return children


def _run_aga(graph: Graph, cfg: GaConfig, budget: SearchBudget, context: Optional[SearchContext],
             breed: Callable[[Population, GaConfig, float, np.random.Generator], list[np.ndarray]],
             label: str) -> Individual:
    """
    Shared generational loop.

    Each epoch samples the whole population with the current ps. The elite
    survives every generation; the p offspring fill the other p - 1 slots
    after one of them, chosen at random, is dropped. An epoch ends after
    ``budget.stagnation_limit`` offspring evaluations without a new best;
    ps is halved after an epoch that matched or beat the previous best and
    reset to 1/2 otherwise.
    """
    require_stopping_rule(budget)
    context = context or budget.start()
    rng = context.rng
    rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1 / graph.n
    sampler = SamplerConfig.for_graph(graph, cfg.ps_floor)
    best: Optional[Individual] = None

    while True:
        previous = best.fitness if best is not None else ConductanceValue.undefined()
        pop = Population([
            Individual.from_bits(graph, sample_random_membership(graph, sampler.ps, rng), context)
            for _ in range(cfg.p)
        ])
        stagnant = 0
        while not context.expired() and stagnant < budget.stagnation_limit:
            offspring = [Individual.from_bits(graph, bits, context) for bits in breed(pop, cfg, rate, rng)]
            for child in offspring:
                stagnant = 0 if pop.record(child) else stagnant + 1
            elite = pop.best()
            offspring.pop(int(rng.integers(len(offspring))))
            pop.members = [elite] + offspring
            context.generations += 1
            if logger.isEnabledFor(logging.DEBUG):
                member = pop.members[context.generations % len(pop)]
                assert member.fitness == evaluate_bits(graph, member.genotype)

        if best is None or pop.best_ever.fitness < best.fitness:
            best = pop.best_ever
        if context.expired():
            break
        context.restarts += 1
        sampler = sampler.halved() if pop.best_ever.fitness <= previous else sampler.reset()
        logger.debug("%s: restart %d, best %s, next ps %g", label, context.restarts, best.fitness, sampler.ps)
    return best


def aga_1px_run(graph: Graph, cfg: GaConfig, budget: SearchBudget,
                context: Optional[SearchContext] = None) -> Individual:
    return _run_aga(graph, cfg, budget, context, _one_point_offspring, "aga-1px")


def aga_ux_run(graph: Graph, cfg: GaConfig, budget: SearchBudget,
               context: Optional[SearchContext] = None) -> Individual:
    return _run_aga(graph, cfg, budget, context, _uniform_offspring, "aga-ux")
