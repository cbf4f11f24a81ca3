"""Tests for the construction heuristic and the genetic-algorithm baselines."""

from __future__ import annotations

import numpy as np

from conftest import mk_instance, mk_sat, mk_task, mk_win
from edssp.baselines import cha, classic_ga, rlga_we
from edssp.model import validate_plan
from edssp.rlga import SolverConfig


class TestCha:
    def test_highest_profit_gets_priority(self):
        t1 = mk_task(1, est=0, let=5000, dur=20, profit=3)
        t2 = mk_task(2, est=0, let=5000, dur=20, profit=9)
        wins = [mk_win(0, 1, 0, 0, evt=0, lvt=1000),
                mk_win(0, 2, 0, 0, evt=0, lvt=1000)]
        inst = mk_instance([t1, t2], [mk_sat(0, storage=10**6)], wins)
        plan = cha(inst)
        st = {a.task: a.st for a in plan.assignments}
        assert st[2] == 490  # decoded first, takes the center
        assert st[1] == 515

    def test_ties_break_by_lower_id(self):
        t3 = mk_task(3, est=0, let=5000, dur=20, profit=5)
        t7 = mk_task(7, est=0, let=5000, dur=20, profit=5)
        wins = [mk_win(0, 3, 0, 0, evt=0, lvt=1000),
                mk_win(0, 7, 0, 0, evt=0, lvt=1000)]
        inst = mk_instance([t7, t3], [mk_sat(0, storage=10**6)], wins)
        st = {a.task: a.st for a in cha(inst).assignments}
        assert st[3] == 490
        assert st[7] == 515

    def test_feasible_and_deterministic(self, gen_instance_medium):
        p1 = cha(gen_instance_medium)
        p2 = cha(gen_instance_medium)
        assert p1 == p2
        rep = validate_plan(gen_instance_medium, p1)
        assert rep.feasible, rep.summary()
        assert p1.profit > 0


class TestClassicGa:
    def test_contract(self, gen_instance_small):
        cfg = SolverConfig(np=10, mfe=200, seed=3)
        res = classic_ga(gen_instance_small, cfg)
        assert res.algorithm == "classic_ga"
        assert res.qtable is None
        assert res.evaluations == 210
        assert res.trace.shape == (210,)
        assert (np.diff(res.trace) >= 0).all()
        rep = validate_plan(gen_instance_small, res.plan)
        assert rep.feasible, rep.summary()
        assert res.plan.profit == res.best_profit == res.trace[-1]

    def test_deterministic(self, gen_instance_small):
        cfg = SolverConfig(np=10, mfe=120, seed=8)
        a = classic_ga(gen_instance_small, cfg)
        b = classic_ga(gen_instance_small, cfg)
        assert a.best_profit == b.best_profit
        assert a.best_order == b.best_order
        assert np.array_equal(a.trace, b.trace)

    def test_improves_on_initial_population(self, gen_instance_small):
        res = classic_ga(gen_instance_small, SolverConfig(np=10, mfe=500, seed=1))
        assert res.best_profit >= res.trace[9]


class TestRlgaWe:
    def test_contract(self, gen_instance_small):
        cfg = SolverConfig(np=10, mfe=200, seed=3)
        res = rlga_we(gen_instance_small, cfg)
        assert res.algorithm == "rlga_we"
        assert res.qtable is not None
        assert res.evaluations == 210
        rep = validate_plan(gen_instance_small, res.plan)
        assert rep.feasible, rep.summary()
        assert res.plan.profit == res.best_profit

    def test_deterministic(self, gen_instance_small):
        cfg = SolverConfig(np=10, mfe=120, seed=8)
        a = rlga_we(gen_instance_small, cfg)
        b = rlga_we(gen_instance_small, cfg)
        assert a.best_profit == b.best_profit
        assert np.array_equal(a.trace, b.trace)
