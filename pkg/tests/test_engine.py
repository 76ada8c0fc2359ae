import itertools
from fractions import Fraction

import numpy as np
import pytest

from mincond.core.engine import (
    ConductanceValue,
    argmin_ratio,
    brute_force_min_conductance,
    evaluate_bits,
    format_decimal,
    init_from_bits,
    write_partition,
)
from mincond.core.errors import LengthMismatch, SameSide, TooLarge, UndefinedPartition, UndefinedPhi
from mincond.core.graph import Graph

from conftest import atlas_graphs, random_connected_graph


def _all_memberships(n: int):
    for code in range(1, (1 << n) - 1):
        yield np.array([(code >> i) & 1 for i in range(n)], dtype=np.uint8)


def test_undefined_orders_above_everything():
    undefined = ConductanceValue.undefined()
    assert ConductanceValue(5, 1) < undefined
    assert not undefined < undefined
    assert undefined == ConductanceValue(3, 0)
    assert float(undefined) == float("inf")
    with pytest.raises(UndefinedPartition):
        undefined.as_fraction()


def test_values_compare_exactly():
    assert ConductanceValue(1, 7) == ConductanceValue(2, 14)
    assert ConductanceValue(1, 7) < ConductanceValue(1, 6)
    assert hash(ConductanceValue(1, 7)) == hash(ConductanceValue(3, 21))
    assert ConductanceValue(10, 78).as_fraction() == Fraction(5, 39)


@pytest.mark.parametrize("value, text", [
    (ConductanceValue(10, 78), "0.12820513"),
    (ConductanceValue(1, 7), "0.14285714"),
    (ConductanceValue(2, 3), "0.66666667"),
    (ConductanceValue(0, 4), "0.00000000"),
    (ConductanceValue(1, 1), "1.00000000"),
])
def test_display_uses_eight_digits(value, text):
    assert value.display() == text


def test_format_decimal_rounds_half_up():
    assert format_decimal(Fraction(1, 2 * 10**8)) == "0.00000001"
    assert format_decimal(Fraction(1, 3), digits=2) == "0.33"


def test_argmin_ratio_picks_smallest_index_on_ties():
    assert argmin_ratio(np.array([1, 2, 1]), np.array([2, 4, 3])) == 2
    assert argmin_ratio(np.array([2, 1, 3]), np.array([4, 2, 6])) == 0


def test_argmin_ratio_is_exact_beyond_float_precision():
    big = 2**30
    numerators = np.array([big + 1, big], dtype=np.int64)
    denominators = np.array([big + 2, big + 1], dtype=np.int64)
    # (big + 1)/(big + 2) > big/(big + 1); the quotients differ below float resolution
    assert argmin_ratio(numerators, denominators) == 1


def test_init_from_bits_rejects_wrong_length(triangle):
    with pytest.raises(LengthMismatch):
        init_from_bits(triangle, [1, 0])


def test_init_from_bits_matches_hand_computation(barbell):
    state = init_from_bits(barbell, [1, 1, 1, 0, 0, 0])
    assert (state.cut, state.vol_s, state.vol_comp) == (1, 7, 7)
    assert state.phi() == ConductanceValue(1, 7)
    assert state.boundary_s.tolist() == [2, 2, 2, 1, 0, 0]
    assert state.boundary_comp.tolist() == [0, 0, 1, 2, 2, 2]
    state.check()


def test_empty_side_is_undefined(triangle):
    assert not init_from_bits(triangle, [0, 0, 0]).phi().defined
    assert not evaluate_bits(triangle, np.ones(3, dtype=np.uint8)).defined


def test_phi_is_complement_symmetric(zachary):
    rng = np.random.default_rng(11)
    for _ in range(50):
        bits = (rng.random(zachary.n) < 0.4).astype(np.uint8)
        assert evaluate_bits(zachary, bits) == evaluate_bits(zachary, 1 - bits)


def test_max_form_equals_min_form(zachary):
    rng = np.random.default_rng(5)
    for _ in range(50):
        state = init_from_bits(zachary, (rng.random(zachary.n) < 0.3).astype(np.uint8))
        if state.vol_s and state.vol_comp:
            assert state.phi_max_form() == state.phi()
    with pytest.raises(UndefinedPartition):
        init_from_bits(zachary, np.zeros(zachary.n)).phi_max_form()


def test_symmetry_and_max_form_on_ten_thousand_partitions():
    rng = np.random.default_rng(21)
    checked = 0
    for seed in range(20):
        g = random_connected_graph(30 + seed, 0.15, seed)
        for _ in range(500):
            bits = (rng.random(g.n) < rng.uniform(0.05, 0.95)).astype(np.uint8)
            phi = evaluate_bits(g, bits)
            assert phi == evaluate_bits(g, 1 - bits)
            state = init_from_bits(g, bits)
            assert state.phi() == phi
            if state.vol_s and state.vol_comp:
                assert state.phi_max_form() == phi
            checked += 1
    assert checked == 10_000


def _snapshot(state):
    return (state.membership.tolist(), state.boundary_s.tolist(), state.boundary_comp.tolist(),
            state.cut, state.vol_s, state.vol_comp, state.size_s)


def test_flip_twice_restores_the_state():
    g = random_connected_graph(80, 0.06, 4)
    rng = np.random.default_rng(4)
    state = init_from_bits(g, (rng.random(g.n) < 0.5).astype(np.uint8))
    for v in range(g.n):
        before = _snapshot(state)
        state.apply_flip(v).apply_flip(v)
        assert _snapshot(state) == before
    state.check()


def test_swap_twice_restores_the_state():
    g = random_connected_graph(80, 0.06, 5)
    rng = np.random.default_rng(5)
    state = init_from_bits(g, (rng.random(g.n) < 0.5).astype(np.uint8))
    for _ in range(300):
        u, w = state.sample_in_s(rng), state.sample_out_s(rng)
        before = _snapshot(state)
        state.apply_swap(u, w)
        # u is now outside S and w inside
        state.apply_swap(w, u)
        assert _snapshot(state) == before
    state.check()


def test_swap_of_non_adjacent_pair_equals_two_flips(zachary):
    rng = np.random.default_rng(12)
    state = init_from_bits(zachary, (rng.random(zachary.n) < 0.5).astype(np.uint8))
    pairs = 0
    for u in np.flatnonzero(state.membership == 1).tolist():
        for w in np.flatnonzero(state.membership == 0).tolist():
            if zachary.has_edge(u, w):
                continue
            swap = state.eval_swap(u, w)
            after_u = state.copy().apply_flip(u)
            second = after_u.eval_flip(w)
            assert (swap.new_cut, swap.new_vol_s, swap.new_vol_comp) == \
                (second.new_cut, second.new_vol_s, second.new_vol_comp)
            pairs += 1
    assert pairs > 100


def test_flip_delta_matches_recomputation(zachary):
    rng = np.random.default_rng(1)
    state = init_from_bits(zachary, (rng.random(zachary.n) < 0.5).astype(np.uint8))
    for v in range(zachary.n):
        delta = state.eval_flip(v)
        bits = state.bits()
        bits[v] ^= 1
        fresh = init_from_bits(zachary, bits)
        assert (delta.new_cut, delta.new_vol_s, delta.new_vol_comp) == (fresh.cut, fresh.vol_s, fresh.vol_comp)


def test_swap_counts_the_edge_between_the_pair(barbell):
    state = init_from_bits(barbell, [1, 1, 1, 0, 0, 0])
    # 2 and 3 are adjacent, so the joining edge stays cut
    delta = state.eval_swap(2, 3)
    assert delta.new_cut == init_from_bits(barbell, [1, 1, 0, 1, 0, 0]).cut == 5
    with pytest.raises(SameSide):
        state.eval_swap(0, 1)
    with pytest.raises(SameSide):
        state.apply_swap(4, 5)


def test_incremental_updates_match_full_recomputation():
    for seed in range(20):
        g = random_connected_graph(200, 0.02 + 0.004 * seed, seed)
        rng = np.random.default_rng(seed)
        state = init_from_bits(g, (rng.random(g.n) < 0.5).astype(np.uint8))
        for step in range(5000):
            if rng.random() < 0.5:
                v = int(rng.integers(g.n))
                delta = state.eval_flip(v)
                if not delta.degenerate:
                    state.apply_flip(v)
            else:
                u, w = state.sample_in_s(rng), state.sample_out_s(rng)
                delta = state.eval_swap(u, w)
                state.apply_swap(u, w)
                assert (state.cut, state.vol_s, state.vol_comp) == (delta.new_cut, delta.new_vol_s, delta.new_vol_comp)
            if step % 50 == 0:
                state.check()
        state.check()


def test_copy_is_independent(barbell):
    state = init_from_bits(barbell, [1, 1, 0, 0, 0, 0])
    clone = state.copy()
    clone.apply_flip(2)
    state.check()
    clone.check()
    assert state.cut != clone.cut


def test_improvement_predicate_agrees_with_direct_comparison():
    for g in atlas_graphs(2, 5):
        for bits in _all_memberships(g.n):
            state = init_from_bits(g, bits)
            for v in range(g.n):
                delta = state.eval_flip(v)
                if delta.degenerate:
                    continue
                assert state.improvement_predicate(delta) == (delta.phi <= state.phi())
            for u, w in itertools.product(range(g.n), repeat=2):
                if bits[u] == 1 and bits[w] == 0:
                    delta = state.eval_swap(u, w)
                    if not delta.degenerate:
                        assert state.improvement_predicate(delta) == (delta.phi <= state.phi())


def test_improvement_predicate_needs_positive_cut():
    g = Graph.from_edges([(0, 1), (2, 3)])
    state = init_from_bits(g, [1, 1, 0, 0])
    with pytest.raises(UndefinedPhi):
        state.improvement_predicate(state.eval_flip(0))


def test_scan_flips_matches_eval_flip(zachary):
    state = init_from_bits(zachary, np.arange(zachary.n) % 3 == 0)
    new_cut, new_den = state.scan_flips()
    for v in range(zachary.n):
        delta = state.eval_flip(v)
        assert new_cut[v] == delta.new_cut
        assert new_den[v] == min(delta.new_vol_s, delta.new_vol_comp)


def test_sampling_stays_on_its_side(zachary):
    rng = np.random.default_rng(2)
    state = init_from_bits(zachary, np.arange(zachary.n) < 10)
    for _ in range(200):
        assert state.membership[state.sample_in_s(rng)] == 1
        assert state.membership[state.sample_out_s(rng)] == 0


@pytest.mark.parametrize("fixture, expected", [
    ("barbell", ConductanceValue(1, 7)),
    ("k4", ConductanceValue(2, 3)),
    ("triangle", ConductanceValue(1, 1)),
])
def test_brute_force_known_minima(request, fixture, expected):
    g = request.getfixturevalue(fixture)
    value, witness = brute_force_min_conductance(g)
    assert value == expected
    assert witness[0] == 0
    assert evaluate_bits(g, witness) == value


def test_brute_force_agrees_with_exhaustive_enumeration():
    for g in atlas_graphs(2, 5):
        expected = min(evaluate_bits(g, bits) for bits in _all_memberships(g.n))
        assert brute_force_min_conductance(g)[0] == expected


def test_brute_force_refuses_large_graphs(zachary):
    with pytest.raises(TooLarge):
        brute_force_min_conductance(zachary)


def test_write_partition(tmp_path, barbell):
    path = tmp_path / "out" / "partition.txt"
    write_partition(str(path), barbell, np.array([1, 1, 1, 0, 0, 0]), ConductanceValue(1, 7))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# conductance 0.14285714"
    assert lines[1:] == ["0 1", "1 1", "2 1", "3 0", "4 0", "5 0"]
