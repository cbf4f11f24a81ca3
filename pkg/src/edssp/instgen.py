"""Seeded synthetic instance generator.

Orbits partition the horizon into consecutive revolutions of Keplerian
period; tasks, their visible windows and profits are drawn from fixed
distributions.  Storage capacity is set below the visible demand so
instances are oversubscribed and schedulers must discard tasks.  The
generating spec is echoed into the instance file, making every experiment
reproducible from the file alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import physics
from .model import Instance, Orbit, Satellite, Task, TimeWindow

MU_EARTH = 398600.0  # km^3/s^2
MIN_SEMI_MAJOR_AXIS = 6378.0  # km, Earth radius

# Tier -> gain-weight interval; most important tier gets the largest weights.
OMEGA_INTERVALS: dict[int, tuple[float, float]] = {
    1: (13.0, 15.0),
    2: (10.0, 12.0),
    3: (7.0, 9.0),
    4: (1.0, 3.0),
}

# Transition table and settling time shared by all generated satellites.
GAMMA_DEFAULTS = {"fre": 30, "band": 20, "pol": 25, "mode": 40}
DELTA_DEFAULT = 5
ANTENNA_DIAMETER = 1.5
ANTENNA_EFFICIENCY = 0.6

# Fraction of mean visible per-orbit demand that fits in storage.
STORAGE_FRACTION = 0.7

TASK_HORIZON = 43200  # max seconds between a task's est and let
DUR_RANGE = (10, 100)
THETA_MAX_RANGE = (3.0, 10.0)
N_FRE, N_POL, N_MODE = 4, 2, 3


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one synthetic instance."""

    n_tasks: int
    n_sats: int
    horizon: int = 86400
    seed: int = 0
    windows_per_task: tuple[int, int] = (1, 5)
    window_span: tuple[int, int] = (120, 600)
    semi_major_axis: float = 7000.0

    def __post_init__(self) -> None:
        if self.n_tasks < 1:
            raise ValueError(f"n_tasks must be >= 1, got {self.n_tasks}")
        if self.n_sats < 1:
            raise ValueError(f"n_sats must be >= 1, got {self.n_sats}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        for name in ("windows_per_task", "window_span"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise ValueError(f"{name} range ({lo}, {hi}) is empty or invalid")
        if self.semi_major_axis <= MIN_SEMI_MAJOR_AXIS:
            raise ValueError(
                f"semi_major_axis must exceed {MIN_SEMI_MAJOR_AXIS} km, "
                f"got {self.semi_major_axis}"
            )

    def to_dict(self) -> dict:
        return {
            "n_tasks": self.n_tasks,
            "n_sats": self.n_sats,
            "horizon": self.horizon,
            "seed": self.seed,
            "windows_per_task": list(self.windows_per_task),
            "window_span": list(self.window_span),
            "semi_major_axis": self.semi_major_axis,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GenSpec":
        known = {
            "n_tasks", "n_sats", "horizon", "seed",
            "windows_per_task", "window_span", "semi_major_axis",
        }
        kwargs = {k: v for k, v in doc.items() if k in known}
        for key in ("windows_per_task", "window_span"):
            if key in kwargs:
                lo, hi = kwargs[key]
                kwargs[key] = (int(lo), int(hi))
        return cls(**kwargs)


def orbit_period(a: float) -> float:
    """Keplerian orbital period in seconds for semi-major axis a (km)."""
    if a <= MIN_SEMI_MAJOR_AXIS:
        raise ValueError(f"semi-major axis must exceed {MIN_SEMI_MAJOR_AXIS} km, got {a}")
    return 2.0 * math.pi * math.sqrt(a**3 / MU_EARTH)


def generate_instance(spec: GenSpec) -> Instance:
    """Generate a deterministic oversubscribed instance from a spec."""
    rng = np.random.default_rng(spec.seed)
    period = int(round(orbit_period(spec.semi_major_axis)))
    if period > spec.horizon:
        raise ValueError(
            f"horizon {spec.horizon} shorter than one orbit period {period}"
        )
    n_orbits = spec.horizon // period
    orbit_grid = tuple(
        Orbit(id=o, start=o * period, end=(o + 1) * period) for o in range(n_orbits)
    )

    tasks: list[Task] = []
    windows: list[TimeWindow] = []
    k_counter: dict[tuple[int, int, int], int] = {}
    units = dict(physics.DEFAULT_BANDWIDTH_UNITS)

    for j in range(spec.n_tasks):
        dur = int(rng.integers(DUR_RANGE[0], DUR_RANGE[1] + 1))
        degree = int(rng.integers(1, 101))
        est = int(rng.integers(0, spec.horizon - dur + 1))
        let = min(est + TASK_HORIZON, spec.horizon)
        theta_max = float(rng.uniform(*THETA_MAX_RANGE))
        fre = int(rng.integers(N_FRE))
        pol = int(rng.integers(N_POL))
        mode = int(rng.integers(N_MODE))
        tier = physics.bandwidth_for_degree(degree)
        omega = float(rng.uniform(*OMEGA_INTERVALS[tier]))
        profit = physics.task_profit(degree, 1.0, {tier: omega})
        tasks.append(
            Task(
                id=j, est=est, let=let, dur=dur, theta_max=theta_max,
                degree=degree, profit=profit, fre=fre, pol=pol, mode=mode,
            )
        )

        n_win = int(rng.integers(spec.windows_per_task[0], spec.windows_per_task[1] + 1))
        for _ in range(n_win):
            sat = int(rng.integers(spec.n_sats))
            span = int(rng.integers(spec.window_span[0], spec.window_span[1] + 1))
            # Orbits whose overlap with [est, let] can hold the span; fall
            # back to the largest overlap when the drawn span fits nowhere.
            overlaps = [
                (max(o.start, est), min(o.end, let)) for o in orbit_grid
            ]
            lengths = [hi - lo for lo, hi in overlaps]
            eligible = [i for i, ln in enumerate(lengths) if ln >= span]
            if not eligible:
                best_len = max(lengths)
                if best_len < dur:
                    continue
                span = best_len
                eligible = [i for i, ln in enumerate(lengths) if ln >= span]
            oi = eligible[int(rng.integers(len(eligible)))]
            lo, hi = overlaps[oi]
            evt = lo if hi - lo == span else lo + int(rng.integers(hi - lo - span + 1))
            theta_peak = float(rng.uniform(theta_max * 0.8, theta_max * 2.0))
            key = (sat, j, oi)
            k = k_counter.get(key, 0)
            k_counter[key] = k + 1
            windows.append(
                TimeWindow(
                    sat=sat, task=j, orbit=oi, k=k,
                    evt=evt, lvt=evt + span, theta_peak=theta_peak,
                )
            )

    # Storage: per satellite, a fraction of its mean per-orbit demand.  Each
    # task's data is apportioned across its windows so the total demand seen
    # by all orbits equals the total task demand and capacity genuinely
    # undercuts it (oversubscription).
    win_count: dict[int, int] = {}
    for w in windows:
        win_count[w.task] = win_count.get(w.task, 0) + 1
    demand: dict[tuple[int, int], float] = {}
    for w in windows:
        t = tasks[w.task]
        data = units[physics.bandwidth_for_degree(t.degree)] * t.dur
        share = data / win_count[w.task]
        demand[(w.sat, w.orbit)] = demand.get((w.sat, w.orbit), 0.0) + share

    satellites = []
    fallback = max(units[t.band] * t.dur for t in tasks)
    for s in range(spec.n_sats):
        loads = [v for (sat, _), v in demand.items() if sat == s]
        capacity = (
            max(1, round(STORAGE_FRACTION * (sum(loads) / len(loads))))
            if loads
            else fallback
        )
        satellites.append(
            Satellite(
                id=s,
                antenna_diameter=ANTENNA_DIAMETER,
                antenna_efficiency=ANTENNA_EFFICIENCY,
                storage_capacity=capacity,
                beta=1,
                gamma_fre=GAMMA_DEFAULTS["fre"],
                gamma_band=GAMMA_DEFAULTS["band"],
                gamma_pol=GAMMA_DEFAULTS["pol"],
                gamma_mode=GAMMA_DEFAULTS["mode"],
                delta=DELTA_DEFAULT,
                orbits=orbit_grid,
            )
        )

    return Instance(
        tasks=tuple(tasks),
        satellites=tuple(satellites),
        windows=tuple(windows),
        bandwidth_units=units,
        omega_intervals=dict(OMEGA_INTERVALS),
        gen_spec=spec.to_dict(),
    )
