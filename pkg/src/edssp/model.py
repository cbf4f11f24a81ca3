"""Domain model for detection satellite scheduling.

Tasks, satellites with their orbits, visible time windows, assignments and
plans, plus JSON serialization and a full feasibility validator.  All times
are integer seconds from horizon start, angles are degrees, and data volumes
are integer units so every constraint check is exact.

Instances and plans serialize to JSON objects with top-level ``tasks``,
``satellites``, ``windows`` and ``assignments`` arrays whose field names
match the dataclasses below.  Serialization is canonical (sorted keys,
two-space indent) so identical objects produce identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import physics

# Tolerance for the angle constraint; absorbs float noise at trim boundaries.
ANGLE_TOL = 1e-9

# Constraint identifiers used in validation reports.
TIME_RANGE = "time-range"
ANGLE = "angle"
VISIBILITY = "visibility"
STORAGE = "storage-per-orbit"
TRANSITION = "transition"
UNIQUENESS = "uniqueness"


@dataclass(frozen=True, slots=True)
class Task:
    """One detection task with its time range, angle limit and profit."""

    id: int
    est: int
    let: int
    dur: int
    theta_max: float
    degree: int
    profit: int
    fre: int
    pol: int
    mode: int

    def __post_init__(self) -> None:
        if self.dur <= 0:
            raise ValueError(f"task {self.id}: dur must be positive, got {self.dur}")
        if self.est + self.dur > self.let:
            raise ValueError(
                f"task {self.id}: unschedulable, est {self.est} + dur {self.dur} "
                f"exceeds let {self.let}"
            )
        if self.theta_max <= 0:
            raise ValueError(f"task {self.id}: theta_max must be positive")
        if not 1 <= self.degree <= 100:
            raise ValueError(f"task {self.id}: degree must be in [1, 100], got {self.degree}")
        if self.profit < 0:
            raise ValueError(f"task {self.id}: profit must be non-negative")

    @property
    def band(self) -> int:
        """Bandwidth tier implied by the importance degree."""
        return physics.bandwidth_for_degree(self.degree)

    @property
    def params(self) -> physics.ParamSet:
        return physics.ParamSet(self.fre, self.band, self.pol, self.mode)


@dataclass(frozen=True, slots=True)
class Orbit:
    """One revolution of a satellite: a [start, end] slice of the horizon."""

    id: int
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"orbit {self.id}: start {self.start} must precede end {self.end}")


@dataclass(frozen=True)
class Satellite:
    """A detection satellite: antenna, storage, transition table, orbits."""

    id: int
    antenna_diameter: float
    antenna_efficiency: float
    storage_capacity: int
    beta: int
    gamma_fre: int
    gamma_band: int
    gamma_pol: int
    gamma_mode: int
    delta: int
    orbits: tuple[Orbit, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "orbits", tuple(self.orbits))
        if self.antenna_diameter <= 0:
            raise ValueError(f"satellite {self.id}: antenna_diameter must be positive")
        if not 0 < self.antenna_efficiency <= 1:
            raise ValueError(f"satellite {self.id}: antenna_efficiency must be in (0, 1]")
        if self.storage_capacity <= 0:
            raise ValueError(f"satellite {self.id}: storage_capacity must be positive")
        if self.beta <= 0:
            raise ValueError(f"satellite {self.id}: beta must be positive")
        for name in ("gamma_fre", "gamma_band", "gamma_pol", "gamma_mode", "delta"):
            if getattr(self, name) < 0:
                raise ValueError(f"satellite {self.id}: {name} must be non-negative")
        if not self.orbits:
            raise ValueError(f"satellite {self.id}: needs at least one orbit")
        ids = [o.id for o in self.orbits]
        if len(set(ids)) != len(ids):
            raise ValueError(f"satellite {self.id}: duplicate orbit ids")
        for prev, nxt in zip(self.orbits, self.orbits[1:]):
            if prev.end > nxt.start:
                raise ValueError(
                    f"satellite {self.id}: orbits {prev.id} and {nxt.id} overlap "
                    f"or are out of order"
                )


@dataclass(frozen=True, slots=True)
class TimeWindow:
    """Visibility of one task from one satellite during one orbit.

    The detection angle is zero at the window center and theta_peak at both
    edges, varying linearly in between.
    """

    sat: int
    task: int
    orbit: int
    k: int
    evt: int
    lvt: int
    theta_peak: float

    def __post_init__(self) -> None:
        if self.evt >= self.lvt:
            raise ValueError(
                f"window (sat {self.sat}, task {self.task}, orbit {self.orbit}, k {self.k}): "
                f"evt {self.evt} must precede lvt {self.lvt}"
            )
        if self.theta_peak <= 0:
            raise ValueError(
                f"window (sat {self.sat}, task {self.task}, orbit {self.orbit}, k {self.k}): "
                f"theta_peak must be positive"
            )

    def theta_at(self, t: int) -> float:
        """Detection angle at second t under the symmetric V profile."""
        span = self.lvt - self.evt
        return self.theta_peak * abs(2 * (t - self.evt) - span) / span


@dataclass(frozen=True, slots=True)
class Assignment:
    """A scheduled observation: task placed inside one visible window."""

    task: int
    sat: int
    orbit: int
    window: int
    st: int
    et: int
    data: int

    def __post_init__(self) -> None:
        if self.st >= self.et:
            raise ValueError(f"assignment for task {self.task}: st must precede et")
        if self.data < 0:
            raise ValueError(f"assignment for task {self.task}: data must be non-negative")


@dataclass(frozen=True)
class Plan:
    """A schedule: assignments plus the total profit they claim."""

    assignments: tuple[Assignment, ...]
    profit: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignments", tuple(self.assignments))


class InstanceArrays:
    """Columnar views of an instance for the decode kernel and validator.

    Internal plumbing: all id references are translated to dense indices,
    windows are stored in CSR layout grouped by task and sorted
    chronologically, and orbits get global indices across satellites.
    """

    def __init__(self, instance: "Instance") -> None:
        tasks = instance.tasks
        sats = instance.satellites
        units = instance.bandwidth_units
        n = len(tasks)

        self.task_ids = np.array([t.id for t in tasks], dtype=np.int64)
        self.id_to_tidx = {t.id: i for i, t in enumerate(tasks)}
        self.est = np.array([t.est for t in tasks], dtype=np.int64)
        self.let = np.array([t.let for t in tasks], dtype=np.int64)
        self.dur = np.array([t.dur for t in tasks], dtype=np.int64)
        self.profit = np.array([t.profit for t in tasks], dtype=np.int64)
        self.theta_max = np.array([t.theta_max for t in tasks], dtype=np.float64)
        self.fre = np.array([t.fre for t in tasks], dtype=np.int64)
        self.band = np.array([t.band for t in tasks], dtype=np.int64)
        self.pol = np.array([t.pol for t in tasks], dtype=np.int64)
        self.mode = np.array([t.mode for t in tasks], dtype=np.int64)
        self.bw_value = np.array([units[t.band] for t in tasks], dtype=np.int64)

        self.sat_ids = np.array([s.id for s in sats], dtype=np.int64)
        self.sid_to_sidx = {s.id: i for i, s in enumerate(sats)}
        self.beta = np.array([s.beta for s in sats], dtype=np.int64)
        self.gfre = np.array([s.gamma_fre for s in sats], dtype=np.int64)
        self.gband = np.array([s.gamma_band for s in sats], dtype=np.int64)
        self.gpol = np.array([s.gamma_pol for s in sats], dtype=np.int64)
        self.gmode = np.array([s.gamma_mode for s in sats], dtype=np.int64)
        self.delta = np.array([s.delta for s in sats], dtype=np.int64)
        self.cap = np.array([s.storage_capacity for s in sats], dtype=np.int64)

        orb_sat: list[int] = []
        orb_id: list[int] = []
        orb_start: list[int] = []
        orb_end: list[int] = []
        self.orbkey_to_oidx: dict[tuple[int, int], int] = {}
        for si, s in enumerate(sats):
            for o in s.orbits:
                self.orbkey_to_oidx[(s.id, o.id)] = len(orb_sat)
                orb_sat.append(si)
                orb_id.append(o.id)
                orb_start.append(o.start)
                orb_end.append(o.end)
        self.orb_sat = np.array(orb_sat, dtype=np.int64)
        self.orb_id = np.array(orb_id, dtype=np.int64)
        self.orb_start = np.array(orb_start, dtype=np.int64)
        self.orb_end = np.array(orb_end, dtype=np.int64)
        self.orb_cap = self.cap[self.orb_sat]

        per_task: list[list[TimeWindow]] = [[] for _ in range(n)]
        for w in instance.windows:
            per_task[self.id_to_tidx[w.task]].append(w)
        for lst in per_task:
            lst.sort(key=lambda w: (w.evt, w.lvt, w.sat, w.orbit, w.k))

        self.win_off = np.zeros(n + 1, dtype=np.int64)
        flat: list[TimeWindow] = []
        for i, lst in enumerate(per_task):
            flat.extend(lst)
            self.win_off[i + 1] = len(flat)
        self.win_sat = np.array([self.sid_to_sidx[w.sat] for w in flat], dtype=np.int64)
        self.win_orb = np.array(
            [self.orbkey_to_oidx[(w.sat, w.orbit)] for w in flat], dtype=np.int64
        )
        self.win_k = np.array([w.k for w in flat], dtype=np.int64)
        self.win_evt = np.array([w.evt for w in flat], dtype=np.int64)
        self.win_lvt = np.array([w.lvt for w in flat], dtype=np.int64)
        self.win_theta = np.array([w.theta_peak for w in flat], dtype=np.float64)
        self.winkey_to_widx = {
            (w.sat, w.task, w.orbit, w.k): i for i, w in enumerate(flat)
        }

        counts = np.bincount(self.win_orb, minlength=len(orb_sat)) if flat else np.zeros(
            len(orb_sat), dtype=np.int64
        )
        self.occ_cap = int(counts.max()) + 1 if len(counts) else 1

    @property
    def n_tasks(self) -> int:
        return self.task_ids.size

    @property
    def n_orbits(self) -> int:
        return self.orb_sat.size


@dataclass
class Instance:
    """A full problem instance: tasks, satellites and visible windows.

    Immutable after construction by convention; the columnar array cache
    assumes no field is reassigned.
    """

    tasks: tuple[Task, ...]
    satellites: tuple[Satellite, ...]
    windows: tuple[TimeWindow, ...]
    bandwidth_units: dict[int, int] = field(
        default_factory=lambda: dict(physics.DEFAULT_BANDWIDTH_UNITS)
    )
    omega_intervals: dict[int, tuple[float, float]] | None = None
    gen_spec: dict[str, Any] | None = None

    def __post_init__(self) -> None:
        self.tasks = tuple(self.tasks)
        self.satellites = tuple(self.satellites)
        self.windows = tuple(self.windows)
        if not self.tasks:
            raise ValueError("instance needs at least one task")
        if not self.satellites:
            raise ValueError("instance needs at least one satellite")
        task_ids = [t.id for t in self.tasks]
        if len(set(task_ids)) != len(task_ids):
            raise ValueError("duplicate task ids")
        sat_ids = [s.id for s in self.satellites]
        if len(set(sat_ids)) != len(sat_ids):
            raise ValueError("duplicate satellite ids")
        for tier in (1, 2, 3, 4):
            if self.bandwidth_units.get(tier, 0) <= 0:
                raise ValueError(f"bandwidth_units missing positive value for tier {tier}")

        task_set = set(task_ids)
        orbit_bounds: dict[tuple[int, int], Orbit] = {}
        for s in self.satellites:
            for o in s.orbits:
                orbit_bounds[(s.id, o.id)] = o
        seen_keys: set[tuple[int, int, int, int]] = set()
        for w in self.windows:
            label = f"window (sat {w.sat}, task {w.task}, orbit {w.orbit}, k {w.k})"
            if w.task not in task_set:
                raise ValueError(f"{label}: unknown task")
            orbit = orbit_bounds.get((w.sat, w.orbit))
            if orbit is None:
                raise ValueError(f"{label}: unknown satellite orbit")
            if w.evt < orbit.start or w.lvt > orbit.end:
                raise ValueError(f"{label}: outside orbit bounds [{orbit.start}, {orbit.end}]")
            key = (w.sat, w.task, w.orbit, w.k)
            if key in seen_keys:
                raise ValueError(f"{label}: duplicate window index")
            seen_keys.add(key)

    @cached_property
    def arrays(self) -> InstanceArrays:
        return InstanceArrays(self)


@dataclass(frozen=True, slots=True)
class Violation:
    """One violated constraint occurrence."""

    kind: str
    message: str
    task: int | None = None
    sat: int | None = None
    orbit: int | None = None


@dataclass
class ValidationReport:
    """Outcome of validate_plan: constraint violations plus structural errors.

    Structural errors (dangling references, malformed fields) are kept apart
    from constraint violations; a plan is feasible only when both are empty.
    """

    violations: list[Violation] = field(default_factory=list)
    structural_errors: list[str] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations and not self.structural_errors

    def summary(self) -> str:
        if self.feasible:
            return "feasible"
        parts = [f"{len(self.violations)} violation(s)"]
        for v in self.violations[:10]:
            parts.append(f"  [{v.kind}] {v.message}")
        if len(self.violations) > 10:
            parts.append(f"  ... {len(self.violations) - 10} more")
        for e in self.structural_errors[:10]:
            parts.append(f"  [structural] {e}")
        return "\n".join(parts)


def _transition_seconds(
    arr: InstanceArrays, sidx: int, ta: int, tb: int
) -> int:
    """Transition seconds between task indices ta -> tb on satellite sidx."""
    t = arr.delta[sidx]
    if arr.fre[ta] != arr.fre[tb]:
        t = max(t, arr.gfre[sidx])
    if arr.band[ta] != arr.band[tb]:
        t = max(t, arr.gband[sidx])
    if arr.pol[ta] != arr.pol[tb]:
        t = max(t, arr.gpol[sidx])
    if arr.mode[ta] != arr.mode[tb]:
        t = max(t, arr.gmode[sidx])
    return int(t)


def validate_plan(instance: Instance, plan: Plan) -> ValidationReport:
    """Check a plan against every scheduling constraint.

    Reports one entry per violated constraint occurrence, tagged time-range,
    angle, visibility, storage-per-orbit, transition or uniqueness.  Dangling
    task/window references and malformed assignment fields are reported as
    structural errors instead.  An empty report means the plan is feasible.
    """
    arr = instance.arrays
    report = ValidationReport()

    tidx: list[int] = []
    widx: list[int] = []
    st_l: list[int] = []
    et_l: list[int] = []
    for i, a in enumerate(plan.assignments):
        ti = arr.id_to_tidx.get(a.task)
        if ti is None:
            report.structural_errors.append(f"assignment {i}: unknown task {a.task}")
            continue
        wi = arr.winkey_to_widx.get((a.sat, a.task, a.orbit, a.window))
        if wi is None:
            report.structural_errors.append(
                f"assignment {i}: no window k={a.window} for task {a.task} "
                f"on sat {a.sat} orbit {a.orbit}"
            )
            continue
        if a.et - a.st != arr.dur[ti]:
            report.structural_errors.append(
                f"assignment {i}: span {a.et - a.st} != task duration {arr.dur[ti]}"
            )
        expected = int(arr.beta[arr.win_sat[wi]] * arr.bw_value[ti] * arr.dur[ti])
        if a.data != expected:
            report.structural_errors.append(
                f"assignment {i}: data {a.data} != beta*bandwidth*dur = {expected}"
            )
        tidx.append(ti)
        widx.append(wi)
        st_l.append(a.st)
        et_l.append(a.et)

    if not report.structural_errors:
        total = int(arr.profit[tidx].sum()) if tidx else 0
        if plan.profit != total:
            report.structural_errors.append(
                f"plan profit {plan.profit} != sum of task profits {total}"
            )

    if not tidx:
        return report

    t = np.array(tidx, dtype=np.int64)
    w = np.array(widx, dtype=np.int64)
    st = np.array(st_l, dtype=np.int64)
    et = np.array(et_l, dtype=np.int64)
    task_id = arr.task_ids[t]
    oidx = arr.win_orb[w]
    sidx = arr.win_sat[w]

    counts: dict[int, int] = {}
    for ti in tidx:
        counts[ti] = counts.get(ti, 0) + 1
    for ti, c in counts.items():
        if c > 1:
            report.violations.append(
                Violation(
                    UNIQUENESS,
                    f"task {arr.task_ids[ti]} scheduled {c} times",
                    task=int(arr.task_ids[ti]),
                )
            )

    bad = (st < arr.est[t]) | (et > arr.let[t])
    for i in np.nonzero(bad)[0]:
        report.violations.append(
            Violation(
                TIME_RANGE,
                f"task {task_id[i]}: [{st[i]}, {et[i]}] outside required range "
                f"[{arr.est[t[i]]}, {arr.let[t[i]]}]",
                task=int(task_id[i]),
            )
        )

    evt = arr.win_evt[w]
    lvt = arr.win_lvt[w]
    bad = (st < evt) | (et > lvt)
    for i in np.nonzero(bad)[0]:
        report.violations.append(
            Violation(
                VISIBILITY,
                f"task {task_id[i]}: [{st[i]}, {et[i]}] outside visible window "
                f"[{evt[i]}, {lvt[i]}]",
                task=int(task_id[i]),
            )
        )

    span = (lvt - evt).astype(np.float64)
    theta_st = arr.win_theta[w] * np.abs(2 * (st - evt) - (lvt - evt)) / span
    theta_et = arr.win_theta[w] * np.abs(2 * (et - evt) - (lvt - evt)) / span
    theta = np.maximum(theta_st, theta_et)
    bad = theta > arr.theta_max[t] + ANGLE_TOL
    for i in np.nonzero(bad)[0]:
        report.violations.append(
            Violation(
                ANGLE,
                f"task {task_id[i]}: detection angle {theta[i]:.6f} exceeds "
                f"max {arr.theta_max[t[i]]:.6f}",
                task=int(task_id[i]),
            )
        )

    data = arr.beta[sidx] * arr.bw_value[t] * arr.dur[t]
    used = np.zeros(arr.n_orbits, dtype=np.int64)
    np.add.at(used, oidx, data)
    for oi in np.nonzero(used > arr.orb_cap)[0]:
        report.violations.append(
            Violation(
                STORAGE,
                f"sat {arr.sat_ids[arr.orb_sat[oi]]} orbit {arr.orb_id[oi]}: "
                f"data {used[oi]} exceeds capacity {arr.orb_cap[oi]}",
                sat=int(arr.sat_ids[arr.orb_sat[oi]]),
                orbit=int(arr.orb_id[oi]),
            )
        )

    order = np.lexsort((st, oidx))
    for a_i, b_i in zip(order, order[1:]):
        if oidx[a_i] != oidx[b_i]:
            continue
        si = int(sidx[a_i])
        tr = _transition_seconds(arr, si, int(t[a_i]), int(t[b_i]))
        gap = int(st[b_i]) - int(et[a_i])
        if gap < tr:
            report.violations.append(
                Violation(
                    TRANSITION,
                    f"tasks {task_id[a_i]} -> {task_id[b_i]} on sat "
                    f"{arr.sat_ids[si]} orbit {arr.orb_id[oidx[a_i]]}: "
                    f"gap {gap} < required transition {tr}",
                    task=int(task_id[b_i]),
                    sat=int(arr.sat_ids[si]),
                    orbit=int(arr.orb_id[oidx[a_i]]),
                )
            )

    return report


def plan_profit(instance: Instance, plan: Plan) -> int:
    """Total profit of a plan: sum of profits of its assigned tasks."""
    by_id = {t.id: t.profit for t in instance.tasks}
    try:
        return sum(by_id[a.task] for a in plan.assignments)
    except KeyError as exc:
        raise ValueError(f"plan references unknown task {exc.args[0]}") from exc


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def canonical_json(data: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _req(d: Mapping[str, Any], key: str, ctx: str) -> Any:
    if key not in d:
        raise ValueError(f"{ctx}: missing field '{key}'")
    return d[key]


def _req_int(d: Mapping[str, Any], key: str, ctx: str) -> int:
    v = _req(d, key, ctx)
    if isinstance(v, bool):
        raise ValueError(f"{ctx}: field '{key}' must be an integer")
    if isinstance(v, int):
        return v
    if isinstance(v, float) and v.is_integer():
        return int(v)
    raise ValueError(f"{ctx}: field '{key}' must be an integer, got {v!r}")


def _req_num(d: Mapping[str, Any], key: str, ctx: str) -> float:
    v = _req(d, key, ctx)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"{ctx}: field '{key}' must be a number, got {v!r}")
    return float(v)


def instance_to_dict(instance: Instance) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "tasks": [
            {
                "id": t.id, "est": t.est, "let": t.let, "dur": t.dur,
                "theta_max": t.theta_max, "degree": t.degree, "profit": t.profit,
                "fre": t.fre, "pol": t.pol, "mode": t.mode,
            }
            for t in instance.tasks
        ],
        "satellites": [
            {
                "id": s.id,
                "antenna_diameter": s.antenna_diameter,
                "antenna_efficiency": s.antenna_efficiency,
                "storage_capacity": s.storage_capacity,
                "beta": s.beta,
                "gamma_fre": s.gamma_fre,
                "gamma_band": s.gamma_band,
                "gamma_pol": s.gamma_pol,
                "gamma_mode": s.gamma_mode,
                "delta": s.delta,
                "orbits": [
                    {"id": o.id, "start": o.start, "end": o.end} for o in s.orbits
                ],
            }
            for s in instance.satellites
        ],
        "windows": [
            {
                "sat": w.sat, "task": w.task, "orbit": w.orbit, "k": w.k,
                "evt": w.evt, "lvt": w.lvt, "theta_peak": w.theta_peak,
            }
            for w in instance.windows
        ],
        "bandwidth_units": {str(k): v for k, v in sorted(instance.bandwidth_units.items())},
    }
    if instance.omega_intervals is not None:
        doc["omega_intervals"] = {
            str(k): [lo, hi] for k, (lo, hi) in sorted(instance.omega_intervals.items())
        }
    if instance.gen_spec is not None:
        doc["gen_spec"] = instance.gen_spec
    return doc


def instance_from_dict(doc: Mapping[str, Any]) -> Instance:
    if not isinstance(doc, Mapping):
        raise ValueError("instance document must be a JSON object")
    tasks = tuple(
        Task(
            id=_req_int(d, "id", "task"),
            est=_req_int(d, "est", "task"),
            let=_req_int(d, "let", "task"),
            dur=_req_int(d, "dur", "task"),
            theta_max=_req_num(d, "theta_max", "task"),
            degree=_req_int(d, "degree", "task"),
            profit=_req_int(d, "profit", "task"),
            fre=_req_int(d, "fre", "task"),
            pol=_req_int(d, "pol", "task"),
            mode=_req_int(d, "mode", "task"),
        )
        for d in _req(doc, "tasks", "instance")
    )
    satellites = tuple(
        Satellite(
            id=_req_int(d, "id", "satellite"),
            antenna_diameter=_req_num(d, "antenna_diameter", "satellite"),
            antenna_efficiency=_req_num(d, "antenna_efficiency", "satellite"),
            storage_capacity=_req_int(d, "storage_capacity", "satellite"),
            beta=_req_int(d, "beta", "satellite"),
            gamma_fre=_req_int(d, "gamma_fre", "satellite"),
            gamma_band=_req_int(d, "gamma_band", "satellite"),
            gamma_pol=_req_int(d, "gamma_pol", "satellite"),
            gamma_mode=_req_int(d, "gamma_mode", "satellite"),
            delta=_req_int(d, "delta", "satellite"),
            orbits=tuple(
                Orbit(
                    id=_req_int(o, "id", "orbit"),
                    start=_req_int(o, "start", "orbit"),
                    end=_req_int(o, "end", "orbit"),
                )
                for o in _req(d, "orbits", "satellite")
            ),
        )
        for d in _req(doc, "satellites", "instance")
    )
    windows = tuple(
        TimeWindow(
            sat=_req_int(d, "sat", "window"),
            task=_req_int(d, "task", "window"),
            orbit=_req_int(d, "orbit", "window"),
            k=_req_int(d, "k", "window"),
            evt=_req_int(d, "evt", "window"),
            lvt=_req_int(d, "lvt", "window"),
            theta_peak=_req_num(d, "theta_peak", "window"),
        )
        for d in _req(doc, "windows", "instance")
    )
    units_doc = doc.get("bandwidth_units")
    if units_doc is None:
        units = dict(physics.DEFAULT_BANDWIDTH_UNITS)
    else:
        units = {int(k): int(v) for k, v in units_doc.items()}
    omega_doc = doc.get("omega_intervals")
    omega = (
        {int(k): (float(v[0]), float(v[1])) for k, v in omega_doc.items()}
        if omega_doc is not None
        else None
    )
    return Instance(
        tasks=tasks,
        satellites=satellites,
        windows=windows,
        bandwidth_units=units,
        omega_intervals=omega,
        gen_spec=doc.get("gen_spec"),
    )


def plan_to_dict(plan: Plan) -> dict[str, Any]:
    return {
        "assignments": [
            {
                "task": a.task, "sat": a.sat, "orbit": a.orbit, "window": a.window,
                "st": a.st, "et": a.et, "data": a.data,
            }
            for a in plan.assignments
        ],
        "profit": plan.profit,
    }


def plan_from_dict(doc: Mapping[str, Any]) -> Plan:
    if not isinstance(doc, Mapping):
        raise ValueError("plan document must be a JSON object")
    assignments = tuple(
        Assignment(
            task=_req_int(d, "task", "assignment"),
            sat=_req_int(d, "sat", "assignment"),
            orbit=_req_int(d, "orbit", "assignment"),
            window=_req_int(d, "window", "assignment"),
            st=_req_int(d, "st", "assignment"),
            et=_req_int(d, "et", "assignment"),
            data=_req_int(d, "data", "assignment"),
        )
        for d in _req(doc, "assignments", "plan")
    )
    return Plan(assignments=assignments, profit=_req_int(doc, "profit", "plan"))


def _load_json(path: Path | str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def save_instance(instance: Instance, path: Path | str) -> None:
    Path(path).write_text(canonical_json(instance_to_dict(instance)), encoding="utf-8")


def load_instance(path: Path | str) -> Instance:
    return instance_from_dict(_load_json(path))


def save_plan(plan: Plan, path: Path | str) -> None:
    Path(path).write_text(canonical_json(plan_to_dict(plan)), encoding="utf-8")


def load_plan(path: Path | str) -> Plan:
    return plan_from_dict(_load_json(path))
