"""Tests for the Q-learning guided genetic algorithm and its operators."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edssp.decoder import Decoder
from edssp.model import validate_plan
from edssp.rlga import (
    ACTIONS,
    N_ACTIONS,
    N_STATES,
    STATE_IMPROVED,
    STATE_NOT_IMPROVED,
    Individual,
    QTable,
    SolverConfig,
    apply_operator,
    q_update,
    reward,
    roulette_select,
    run,
    select_action,
    softmax_probs,
    _apply_action_idx,
    _reverse_segment,
    _sort_segment,
    _swap_mutation,
    _swap_segments,
    _swap_with_prefix,
)


class FakeRng:
    """Deterministic stand-in for a Generator with scripted draws."""

    def __init__(self, ints=(), floats=()):
        self._ints = list(ints)
        self._floats = list(floats)

    def integers(self, *args, **kwargs):
        return self._ints.pop(0)

    def random(self):
        return self._floats.pop(0)


class TestActionCatalog:
    def test_fifteen_actions(self):
        assert len(ACTIONS) == N_ACTIONS == 15
        assert N_STATES == 2

    def test_structure(self):
        assert [a.crossover for a in ACTIONS[:7]] == [1, 2, 3, 4, 5, 6, 7]
        assert all(not a.mutate for a in ACTIONS[:7])
        assert ACTIONS[7].crossover is None and ACTIONS[7].mutate
        assert [a.crossover for a in ACTIONS[8:]] == [1, 2, 3, 4, 5, 6, 7]
        assert all(a.mutate for a in ACTIONS[8:])
        assert [a.index for a in ACTIONS] == list(range(15))


class TestSoftm:
    def test_uniform_on_zero_row(self):
        p = softmax_probs(np.zeros(15), 1000.0)
        assert p == pytest.approx(np.full(15, 1 / 15), abs=1e-15)

    def test_frozen_two_level_row(self):
        # One entry ln(2) above the rest at temp 1 takes probability 1/8.
        row = np.zeros(15)
        row[0] = math.log(2.0)
        p = softmax_probs(row, 1.0)
        assert p[0] == pytest.approx(0.125, abs=1e-12)
        assert p[1:] == pytest.approx(np.full(14, 0.0625), abs=1e-12)

    def test_rows_sum_to_one_batched(self):
        rng = np.random.default_rng(0)
        q = rng.normal(size=(2, 15)) * 50
        p = softmax_probs(q, 7.0)
        assert p.shape == (2, 15)
        assert p.sum(axis=-1) == pytest.approx([1.0, 1.0], abs=1e-12)

    def test_shift_invariance_integer_offset(self):
        row = np.arange(15, dtype=np.float64)
        assert np.array_equal(softmax_probs(row, 3.0), softmax_probs(row + 100.0, 3.0))

    @given(
        vals=st.lists(
            st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
            min_size=15, max_size=15,
        ),
        shift=st.floats(min_value=-1e5, max_value=1e5, allow_nan=False),
    )
    @settings(max_examples=100, deadline=None)
    def test_shift_invariance_property(self, vals, shift):
        row = np.array(vals)
        a = softmax_probs(row, 1000.0)
        b = softmax_probs(row + shift, 1000.0)
        assert a.sum() == pytest.approx(1.0, abs=1e-9)
        assert a == pytest.approx(b, abs=1e-12)

    def test_extreme_values_stable(self):
        row = np.zeros(15)
        row[3] = 1e6
        p = softmax_probs(row, 1.0)
        assert np.isfinite(p).all()
        assert p[3] == pytest.approx(1.0, abs=1e-12)

    def test_temp_must_be_positive(self):
        with pytest.raises(ValueError):
            softmax_probs(np.zeros(15), 0.0)


class TestSelectAction:
    def test_peaked_table_is_greedy(self):
        qt = QTable()
        qt.values[0, 3] = 1e6
        cfg = SolverConfig(eps=0.0, temp=1.0)
        rng = np.random.default_rng(0)
        picks = {select_action(qt, 0, cfg, rng).index for _ in range(50)}
        assert picks == {3}

    def test_uniform_on_fresh_table(self):
        cfg = SolverConfig(eps=0.0, temp=1000.0)
        rng = np.random.default_rng(1)
        counts = np.zeros(15, dtype=int)
        trials = 15000
        for _ in range(trials):
            counts[select_action(QTable(), 0, cfg, rng).index] += 1
        expect = trials / 15
        sigma = math.sqrt(trials * (1 / 15) * (14 / 15))
        assert np.abs(counts - expect).max() < 4 * sigma

    def test_epsilon_explores_against_peak(self):
        qt = QTable()
        qt.values[1, 0] = 1e9
        cfg = SolverConfig(eps=0.5, temp=1.0)
        rng = np.random.default_rng(2)
        picks = {select_action(qt, 1, cfg, rng).index for _ in range(300)}
        assert len(picks) > 1  # exploration breaks the greedy choice

    def test_invalid_state(self):
        with pytest.raises(ValueError):
            select_action(QTable(), 2, SolverConfig(), np.random.default_rng(0))

    def test_states_independent(self):
        qt = QTable()
        qt.values[0, 5] = 1e6
        cfg = SolverConfig(eps=0.0, temp=1.0)
        rng = np.random.default_rng(3)
        assert select_action(qt, 0, cfg, rng).index == 5
        counts = {select_action(qt, 1, cfg, rng).index for _ in range(100)}
        assert counts != {5}


class TestRoulette:
    def test_three_to_one_odds(self):
        rng = np.random.default_rng(0)
        n = 10000
        wins = sum(roulette_select([1, 3], rng) == 1 for _ in range(n))
        sigma = math.sqrt(n * 0.75 * 0.25)
        assert abs(wins - 0.75 * n) < 3 * sigma

    def test_zero_total_is_uniform(self):
        rng = np.random.default_rng(1)
        n = 9000
        counts = np.zeros(3, dtype=int)
        for _ in range(n):
            counts[roulette_select([0, 0, 0], rng)] += 1
        sigma = math.sqrt(n * (1 / 3) * (2 / 3))
        assert np.abs(counts - n / 3).max() < 4 * sigma

    def test_single_entry(self):
        rng = np.random.default_rng(2)
        assert roulette_select([7], rng) == 0

    def test_zero_weight_entry_never_picked(self):
        rng = np.random.default_rng(3)
        assert all(roulette_select([0, 5], rng) == 1 for _ in range(200))

    def test_errors(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            roulette_select([], rng)
        with pytest.raises(ValueError):
            roulette_select([3, -1], rng)


class TestQLearning:
    def test_reward_is_difference(self):
        assert reward(12, 10) == 2.0
        assert reward(5, 10) == -5.0
        assert isinstance(reward(1, 1), float)

    def test_update_from_zero(self):
        qt = QTable()
        cfg = SolverConfig(alpha=0.01, gamma=0.95)
        q_update(qt, 0, 3, 10.0, 1, cfg)
        assert qt.values[0, 3] == pytest.approx(0.1, abs=1e-15)
        assert np.count_nonzero(qt.values) == 1

    def test_update_with_bootstrap(self):
        qt = QTable()
        qt.values[0, 3] = 1.0
        qt.values[1, 5] = 1.0
        cfg = SolverConfig(alpha=0.01, gamma=0.95)
        q_update(qt, 0, 3, 0.0, 1, cfg)
        assert qt.values[0, 3] == pytest.approx(0.9995, abs=1e-12)

    def test_accepts_action_object(self):
        qt1, qt2 = QTable(), QTable()
        cfg = SolverConfig()
        q_update(qt1, 0, ACTIONS[4], 2.0, 0, cfg)
        q_update(qt2, 0, 4, 2.0, 0, cfg)
        assert np.array_equal(qt1.values, qt2.values)

    def test_in_place(self):
        qt = QTable()
        assert q_update(qt, 0, 0, 1.0, 0, SolverConfig()) is qt

    def test_qtable_shape_enforced(self):
        with pytest.raises(ValueError):
            QTable(np.zeros((3, 15)))
        qt = QTable([[0.0] * 15, [0.0] * 15])
        assert qt.values.shape == (2, 15)


class TestOperators:
    def test_swap_segments_trace(self):
        order = np.arange(6)
        _swap_segments(order, 2, FakeRng(ints=[0, 4]))
        assert list(order) == [4, 5, 2, 3, 0, 1]

    def test_swap_segments_resamples_overlap(self):
        order = np.arange(6)
        _swap_segments(order, 2, FakeRng(ints=[0, 1, 0, 4]))
        assert list(order) == [4, 5, 2, 3, 0, 1]

    def test_swap_segments_fallback_is_adjacent(self):
        order = np.arange(6)
        _swap_segments(order, 2, FakeRng(ints=[0] * 64))
        assert list(order) == [2, 3, 0, 1, 4, 5]

    def test_swap_segments_clamps_length(self):
        order = np.arange(4)
        _swap_segments(order, 6, FakeRng(ints=[0, 2]))
        assert list(order) == [2, 3, 0, 1]

    def test_reverse_segment_trace(self):
        order = np.arange(6)
        _reverse_segment(order, 2, FakeRng(ints=[1]))
        assert list(order) == [0, 2, 1, 3, 4, 5]

    def test_swap_with_prefix_trace(self):
        order = np.arange(6)
        _swap_with_prefix(order, 2, FakeRng(ints=[3]))
        assert list(order) == [3, 4, 2, 0, 1, 5]

    def test_sort_segment_by_key(self):
        order = np.array([1, 0])
        key = np.array([10, 50])  # key per task index
        _sort_segment(order, 2, key, FakeRng(ints=[0]))
        assert list(order) == [0, 1]

    def test_sort_segment_stable_on_ties(self):
        order = np.array([2, 0, 1])
        key = np.array([5, 5, 5])
        _sort_segment(order, 3, key, FakeRng(ints=[0]))
        assert list(order) == [2, 0, 1]

    def test_swap_mutation_trace(self):
        order = np.arange(6)
        _swap_mutation(order, FakeRng(ints=[2, 4]))  # j >= i shifts to 5
        assert list(order) == [0, 1, 5, 3, 4, 2]

    def test_swap_mutation_always_two_positions(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            order = np.arange(8)
            _swap_mutation(order, rng)
            assert int((order != np.arange(8)).sum()) == 2

    def test_double_and_triple_segments(self):
        est = np.zeros(8, dtype=np.int64)
        dur = np.zeros(8, dtype=np.int64)
        child = _apply_action_idx(
            np.arange(8), ACTIONS[1], 2, est, dur, FakeRng(ints=[0, 4])
        )
        assert list(child) == [4, 5, 6, 7, 0, 1, 2, 3]

    def test_parent_not_mutated(self):
        parent = np.arange(6)
        _apply_action_idx(parent, ACTIONS[0], 2, np.zeros(6), np.zeros(6),
                          FakeRng(ints=[0, 4]))
        assert list(parent) == [0, 1, 2, 3, 4, 5]

    @given(
        action_idx=st.integers(min_value=0, max_value=14),
        n=st.integers(min_value=2, max_value=40),
        seed=st.integers(min_value=0, max_value=10**6),
        seg=st.integers(min_value=1, max_value=6),
    )
    @settings(max_examples=300, deadline=None)
    def test_every_action_preserves_permutation(self, action_idx, n, seed, seg):
        rng = np.random.default_rng(seed)
        parent = rng.permutation(n).astype(np.int64)
        est = rng.integers(0, 1000, size=n)
        dur = rng.integers(1, 100, size=n)
        child = _apply_action_idx(parent.copy(), ACTIONS[action_idx], seg,
                                  est, dur, rng)
        assert sorted(child.tolist()) == list(range(n))


class TestApplyOperator:
    def test_returns_evaluated_child(self, gen_instance_small):
        inst = gen_instance_small
        ids = tuple(t.id for t in inst.tasks)
        parent = Individual(order=ids, fitness=0)
        rng = np.random.default_rng(5)
        child = apply_operator(parent, ACTIONS[0], SolverConfig(), inst, rng)
        assert sorted(child.order) == sorted(ids)
        dec = Decoder(inst)
        assert child.fitness == dec.decode(child.order).profit


class TestSolverConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"np": 1},
            {"np": 10, "mfe": 5},
            {"alpha": 0.0},
            {"alpha": 1.5},
            {"gamma": 1.0},
            {"temp": 0.0},
            {"eps": 1.0},
            {"thre": -1},
            {"seg_len": 0},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    def test_defaults(self):
        cfg = SolverConfig()
        assert (cfg.np, cfg.mfe, cfg.thre) == (10, 5000, 100)
        assert (cfg.alpha, cfg.gamma, cfg.temp, cfg.eps) == (0.01, 0.95, 1000.0, 0.01)


@pytest.fixture(scope="module")
def result(gen_instance_small):
    return run(gen_instance_small, SolverConfig(np=10, mfe=300, seed=4))


class TestRun:
    def test_budget_and_trace_shape(self, result):
        assert result.evaluations == 310
        assert result.trace.shape == (310,)

    def test_trace_monotone_best_so_far(self, result):
        assert (np.diff(result.trace) >= 0).all()
        assert result.trace[-1] == result.best_profit
        assert result.best_profit >= result.trace[0]

    def test_plan_matches_best(self, result, gen_instance_small):
        rep = validate_plan(gen_instance_small, result.plan)
        assert rep.feasible, rep.summary()
        assert result.plan.profit == result.best_profit

    def test_best_order_is_permutation(self, result, gen_instance_small):
        assert sorted(result.best_order) == sorted(
            t.id for t in gen_instance_small.tasks
        )

    def test_best_order_reproduces_profit(self, result, gen_instance_small):
        dec = Decoder(gen_instance_small)
        assert dec.decode(result.best_order).profit == result.best_profit

    def test_qtable_learned(self, result):
        assert result.qtable is not None
        assert result.qtable.shape == (2, 15)
        assert np.any(result.qtable != 0.0)

    def test_deterministic(self, gen_instance_small):
        cfg = SolverConfig(np=10, mfe=120, seed=9)
        a = run(gen_instance_small, cfg)
        b = run(gen_instance_small, cfg)
        assert a.best_profit == b.best_profit
        assert a.best_order == b.best_order
        assert np.array_equal(a.trace, b.trace)
        assert np.array_equal(a.qtable, b.qtable)

    def test_partial_last_generation(self, gen_instance_small):
        res = run(gen_instance_small, SolverConfig(np=10, mfe=15, seed=0))
        assert res.evaluations == 25
        assert res.trace.shape == (25,)

    def test_algorithm_naming(self, gen_instance_small):
        cfg = SolverConfig(np=10, mfe=20, seed=0)
        assert run(gen_instance_small, cfg).algorithm == "rlga"
        assert run(gen_instance_small, cfg, elite=False).algorithm == "rlga_we"
        assert run(gen_instance_small, cfg, algorithm="x").algorithm == "x"

    def test_elite_keeps_best_in_population(self, gen_instance_small):
        seen = []
        run(
            gen_instance_small,
            SolverConfig(np=10, mfe=400, seed=6),
            on_generation=lambda g, fits, gb: seen.append((g, fits.max(), gb)),
        )
        assert len(seen) == 40
        assert [g for g, _, _ in seen] == list(range(40))
        # Global best never decreases, and with elite injection the population
        # still contains it at the end of every generation.
        bests = [gb for _, _, gb in seen]
        assert all(a <= b for a, b in zip(bests, bests[1:]))
        assert all(mx == gb for _, mx, gb in seen)

    def test_to_dict_timing_opt_in(self, result):
        doc = result.to_dict()
        assert "elapsed_ms" not in doc
        assert doc["trace"][0][0] == 1
        assert doc["trace"][-1] == [310, result.best_profit]
        assert len(doc["best_order"]) == len(result.best_order)
        timed = result.to_dict(include_timing=True)
        assert timed["elapsed_ms"] >= 0.0
