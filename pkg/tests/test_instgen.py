"""Tests for the seeded synthetic instance generator."""

from __future__ import annotations

import pytest

from edssp.baselines import cha
from edssp.instgen import (
    OMEGA_INTERVALS,
    GenSpec,
    generate_instance,
    orbit_period,
)
from edssp.model import canonical_json, instance_to_dict
from edssp.physics import DEFAULT_BANDWIDTH_UNITS, bandwidth_for_degree


class TestOrbitPeriod:
    def test_reference_altitudes(self):
        assert orbit_period(7000.0) == pytest.approx(5828.5, abs=1.0)
        assert orbit_period(6778.0) == pytest.approx(5554.0, abs=1.0)

    def test_grows_with_axis(self):
        assert orbit_period(8000.0) > orbit_period(7000.0)

    def test_rejects_subsurface_axis(self):
        with pytest.raises(ValueError):
            orbit_period(6378.0)


class TestGenSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_tasks": 0, "n_sats": 1},
            {"n_tasks": 1, "n_sats": 0},
            {"n_tasks": 1, "n_sats": 1, "horizon": 0},
            {"n_tasks": 1, "n_sats": 1, "windows_per_task": (0, 3)},
            {"n_tasks": 1, "n_sats": 1, "window_span": (300, 200)},
            {"n_tasks": 1, "n_sats": 1, "semi_major_axis": 6000.0},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            GenSpec(**kwargs)

    def test_round_trip(self):
        spec = GenSpec(n_tasks=50, n_sats=3, seed=7, windows_per_task=(2, 4))
        back = GenSpec.from_dict(spec.to_dict())
        assert back == spec

    def test_from_dict_ignores_unknown_keys(self):
        spec = GenSpec.from_dict({"n_tasks": 5, "n_sats": 1, "note": "x"})
        assert spec.n_tasks == 5

    def test_from_dict_coerces_ranges(self):
        spec = GenSpec.from_dict(
            {"n_tasks": 5, "n_sats": 1, "windows_per_task": [2, 3]}
        )
        assert spec.windows_per_task == (2, 3)


@pytest.fixture(scope="module")
def inst():
    return generate_instance(GenSpec(n_tasks=200, n_sats=3, seed=0))


class TestGenerate:
    def test_deterministic(self):
        spec = GenSpec(n_tasks=60, n_sats=2, seed=5)
        a, b = generate_instance(spec), generate_instance(spec)
        assert canonical_json(instance_to_dict(a)) == canonical_json(
            instance_to_dict(b)
        )

    def test_seed_changes_instance(self):
        a = generate_instance(GenSpec(n_tasks=60, n_sats=2, seed=5))
        b = generate_instance(GenSpec(n_tasks=60, n_sats=2, seed=6))
        assert a.tasks != b.tasks

    def test_counts_and_ids(self, inst):
        assert len(inst.tasks) == 200
        assert len(inst.satellites) == 3
        assert [t.id for t in inst.tasks] == list(range(200))

    def test_orbits_partition_horizon(self, inst):
        period = int(round(orbit_period(7000.0)))
        for s in inst.satellites:
            assert s.orbits[0].start == 0
            assert all(o.end - o.start == period for o in s.orbits)
            assert all(
                a.end == b.start for a, b in zip(s.orbits, s.orbits[1:])
            )
            assert s.orbits[-1].end <= 86400

    def test_task_field_ranges(self, inst):
        for t in inst.tasks:
            assert 10 <= t.dur <= 100
            assert 1 <= t.degree <= 100
            assert 0 <= t.est and t.est + t.dur <= t.let <= 86400
            assert t.let == min(t.est + 43200, 86400)
            assert 3.0 <= t.theta_max <= 10.0
            assert 0 <= t.fre < 4 and 0 <= t.pol < 2 and 0 <= t.mode < 3

    def test_profit_matches_tier_interval(self, inst):
        for t in inst.tasks:
            lo, hi = OMEGA_INTERVALS[bandwidth_for_degree(t.degree)]
            assert round(lo) <= t.profit <= round(hi)

    def test_windows_inside_task_range(self, inst):
        tasks = {t.id: t for t in inst.tasks}
        for w in inst.windows:
            t = tasks[w.task]
            assert w.evt >= t.est and w.lvt <= t.let
            assert 0.8 * t.theta_max <= w.theta_peak <= 2.0 * t.theta_max

    def test_window_count_bounds(self, inst):
        per_task: dict[int, int] = {}
        for w in inst.windows:
            per_task[w.task] = per_task.get(w.task, 0) + 1
        assert max(per_task.values()) <= 5
        # nearly every task is visible at least once
        assert len(per_task) >= 0.9 * len(inst.tasks)

    def test_mean_duration(self):
        for seed in (0, 1, 2):
            inst = generate_instance(GenSpec(n_tasks=1000, n_sats=2, seed=seed))
            mean = sum(t.dur for t in inst.tasks) / len(inst.tasks)
            assert 53.0 <= mean <= 57.0

    def test_windows_hold_their_task(self):
        good = 0
        total = 0
        for seed in range(30):
            inst = generate_instance(GenSpec(n_tasks=50, n_sats=2, seed=seed))
            tasks = {t.id: t for t in inst.tasks}
            for w in inst.windows:
                total += 1
                if w.lvt - w.evt >= tasks[w.task].dur:
                    good += 1
        assert good / total > 0.95

    def test_satellite_parameters(self, inst):
        for s in inst.satellites:
            assert s.antenna_diameter == 1.5
            assert s.antenna_efficiency == 0.6
            assert (s.gamma_fre, s.gamma_band, s.gamma_pol, s.gamma_mode) == (
                30, 20, 25, 40,
            )
            assert s.delta == 5
            assert s.beta == 1
            assert s.storage_capacity >= 1

    def test_oversubscribed(self, inst):
        plan = cha(inst)
        assert 0 < len(plan.assignments) < len(inst.tasks)

    def test_metadata_echo(self, inst):
        assert inst.gen_spec == GenSpec(n_tasks=200, n_sats=3, seed=0).to_dict()
        assert inst.omega_intervals == OMEGA_INTERVALS
        assert inst.bandwidth_units == DEFAULT_BANDWIDTH_UNITS

    def test_horizon_shorter_than_period_rejected(self):
        with pytest.raises(ValueError):
            generate_instance(GenSpec(n_tasks=5, n_sats=1, horizon=5000))

    def test_single_task_tiny_instance(self):
        inst = generate_instance(GenSpec(n_tasks=1, n_sats=1, seed=2))
        assert len(inst.tasks) == 1
