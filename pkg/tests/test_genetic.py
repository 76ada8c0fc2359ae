import numpy as np
import pytest

from mincond.core.budget import SearchBudget
from mincond.core.engine import ConductanceValue, evaluate_bits
from mincond.core.errors import InvalidConfig
from mincond.core.genetic import (
    GaConfig,
    Individual,
    Population,
    aga_1px_run,
    aga_ux_run,
    mutate,
    one_point_crossover,
    repair,
    tournament_index,
    tournament_select,
    uniform_crossover,
)


def _population(graph, rows) -> Population:
    return Population([Individual.from_bits(graph, np.array(r, dtype=np.uint8)) for r in rows])


def test_one_point_crossover_swaps_tails():
    rng = np.random.default_rng(0)
    a = np.array([1, 1, 1, 0], dtype=np.uint8)
    b = np.array([0, 0, 0, 1], dtype=np.uint8)
    first, second = one_point_crossover(a, b, rng, point=2)
    assert first.tolist() == [1, 1, 0, 1]
    assert second.tolist() == [0, 0, 1, 0]


def test_one_point_crossover_cut_point_is_interior():
    rng = np.random.default_rng(1)
    a = np.array([1, 0, 0, 0, 0, 0, 0, 1], dtype=np.uint8)
    b = 1 - a
    for _ in range(100):
        first, _ = one_point_crossover(a, b, rng)
        # the first gene always comes from a, the last from b
        assert first[0] == a[0]
        assert first[-1] == b[-1]


def test_repair_fixes_trivial_strings():
    rng = np.random.default_rng(2)
    assert repair(np.zeros(5, dtype=np.uint8), rng).sum() == 1
    assert repair(np.ones(5, dtype=np.uint8), rng).sum() == 4
    kept = np.array([1, 0, 1], dtype=np.uint8)
    assert repair(kept.copy(), rng).tolist() == kept.tolist()


def test_uniform_crossover_of_identical_parents():
    rng = np.random.default_rng(3)
    a = np.array([1, 0, 0, 1, 1], dtype=np.uint8)
    assert uniform_crossover(a, a.copy(), rng).tolist() == a.tolist()


def test_mutate_with_zero_rate_copies():
    rng = np.random.default_rng(4)
    a = np.array([1, 0, 1, 0], dtype=np.uint8)
    child = mutate(a, 0.0, rng)
    assert child.tolist() == a.tolist()
    assert child is not a


def test_mutate_never_returns_trivial_string():
    rng = np.random.default_rng(5)
    a = np.array([1, 0], dtype=np.uint8)
    for _ in range(200):
        child = mutate(a, 0.5, rng)
        assert 0 < child.sum() < 2


def test_uniform_crossover_keeps_agreeing_genes():
    rng = np.random.default_rng(8)
    a = np.array([1, 0, 1, 0, 1, 1, 0, 0], dtype=np.uint8)
    b = np.array([1, 0, 0, 1, 1, 0, 1, 0], dtype=np.uint8)
    agree = a == b
    for _ in range(200):
        child = uniform_crossover(a, b, rng)
        assert child[agree].tolist() == a[agree].tolist()


def test_uniform_crossover_ones_are_binomial():
    rng = np.random.default_rng(9)
    a = np.zeros(4, dtype=np.uint8)
    b = np.ones(4, dtype=np.uint8)
    draws = 8000
    counts = np.bincount([int(uniform_crossover(a, b, rng).sum()) for _ in range(draws)], minlength=5)
    # Binomial(4, 1/2), with the all-0 and all-1 children repaired to 1 and 3 ones
    expected = np.array([0, 5, 6, 5, 0]) / 16 * draws
    assert counts[0] == counts[4] == 0
    for k in (1, 2, 3):
        p = expected[k] / draws
        assert abs(counts[k] - expected[k]) <= 4 * np.sqrt(draws * p * (1 - p))


def test_mutate_with_full_rate_complements(barbell):
    rng = np.random.default_rng(10)
    a = np.array([1, 1, 0, 1, 0, 0], dtype=np.uint8)
    child = mutate(a, 1.0, rng)
    assert child.tolist() == (1 - a).tolist()
    assert evaluate_bits(barbell, child) == evaluate_bits(barbell, a)


def test_mutate_with_rate_one_over_n_flips_one_bit_on_average():
    rng = np.random.default_rng(11)
    n = 100
    a = (np.arange(n) % 2).astype(np.uint8)
    flipped = [int(np.count_nonzero(mutate(a, 1 / n, rng) != a)) for _ in range(2000)]
    assert np.mean(flipped) == pytest.approx(1.0, abs=0.1)


def test_tournament_of_one_is_uniform(barbell):
    rng = np.random.default_rng(12)
    pop = _population(barbell, [[1, 0, 0, 0, 0, 0], [1, 1, 1, 0, 0, 0], [1, 1, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]])
    draws = 4000
    counts = np.bincount([tournament_index(pop, 1, rng) for _ in range(draws)], minlength=4)
    sigma = np.sqrt(draws * 0.25 * 0.75)
    assert np.all(np.abs(counts - draws / 4) <= 4 * sigma)
    selected = tournament_select(pop, 1, rng)
    assert any(selected is ind for ind in pop.members)


def test_worst_index_prefers_largest_index(barbell):
    pop = _population(barbell, [[1, 1, 1, 0, 0, 0], [1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 1]])
    # S = {0} and S = {5} tie at 2/2
    assert pop.worst_index() == 2
    assert pop.best().fitness == ConductanceValue(1, 7)


def test_population_contains_is_complement_aware(barbell):
    pop = _population(barbell, [[1, 1, 1, 0, 0, 0]])
    complement = np.array([0, 0, 0, 1, 1, 1], dtype=np.uint8)
    assert pop.contains(complement)
    assert not pop.contains(complement, complement_aware=False)


def test_large_tournament_returns_the_best(barbell):
    rng = np.random.default_rng(6)
    pop = _population(barbell, [[1, 0, 0, 0, 0, 0], [1, 1, 1, 0, 0, 0], [1, 1, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]])
    assert tournament_index(pop, 200, rng) == 1


def test_record_tracks_strict_improvements(barbell):
    pop = _population(barbell, [[1, 0, 0, 0, 0, 0], [1, 1, 0, 0, 0, 0]])
    assert pop.record(Individual.from_bits(barbell, np.array([1, 1, 1, 0, 0, 0], dtype=np.uint8)))
    assert not pop.record(Individual.from_bits(barbell, np.array([0, 0, 0, 1, 1, 1], dtype=np.uint8)))
    assert pop.best_ever.fitness == ConductanceValue(1, 7)


@pytest.mark.parametrize("kwargs", [{"p": 3}, {"p": 0}, {"p": 4, "t": 5}, {"p": 4, "t": 0}, {"mutation_rate": 1.5}])
def test_ga_config_validation(kwargs):
    with pytest.raises(InvalidConfig):
        GaConfig(**kwargs)


@pytest.mark.parametrize("runner", [aga_1px_run, aga_ux_run])
def test_aga_finds_barbell_optimum(barbell, runner):
    best = runner(barbell, GaConfig(p=20), SearchBudget(max_evaluations=10_000, seed=1))
    assert best.fitness == ConductanceValue(1, 7)
    assert evaluate_bits(barbell, best.genotype) == best.fitness


@pytest.mark.parametrize("runner", [aga_1px_run, aga_ux_run])
def test_aga_restarts_after_stagnation(barbell, runner):
    budget = SearchBudget(max_evaluations=5_000, stagnation_limit=100, seed=2)
    context = budget.start()
    runner(barbell, GaConfig(p=10), budget, context)
    assert context.restarts > 0
    assert context.generations > 0


@pytest.mark.parametrize("runner", [aga_1px_run, aga_ux_run])
def test_aga_is_deterministic(zachary, runner):
    budget = SearchBudget(max_evaluations=5_000, seed=7)
    first = runner(zachary, GaConfig(p=20), budget)
    second = runner(zachary, GaConfig(p=20), budget)
    assert np.array_equal(first.genotype, second.genotype)
    assert first.fitness == second.fitness
