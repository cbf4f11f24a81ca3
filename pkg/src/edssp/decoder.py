"""Greedy time-window decoder: turns a task permutation into a feasible plan.

Tasks are processed in permutation order.  For each task its visible windows
are tried chronologically; a window is first trimmed by the task's required
time range and by the angle limit (stage 1), then the task is placed as close
as possible to the window center, shifting right then left around existing
occupants in closed form (stage 2).  The first successful placement wins and
the task is never revisited, so earlier positions in the permutation take
precedence on contended resources.

The placement inner loop is compiled with numba; the ``Timeline`` class used
for single placements wraps the same compiled search and commit routines, so
there is exactly one placement implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .model import (
    Assignment,
    Instance,
    InstanceArrays,
    Plan,
    Task,
    TimeWindow,
)


@dataclass(frozen=True, slots=True)
class TrimmedWindow:
    """Feasible sub-interval of a window after range and angle trimming."""

    aevt: int
    alvt: int


@njit(cache=True)
def _trim(evt, lvt, est, let, dur, theta_max, theta_peak):
    """Trim a window to its angle- and range-feasible span.

    Returns (lo, hi, ok) where lo..hi+dur is the allowed placement span,
    hi being the latest feasible start.  ok is False when the trimmed span
    is shorter than dur.
    """
    span = lvt - evt
    if theta_max < theta_peak:
        d = span * (theta_max / theta_peak)
        alo = evt + int(math.ceil((span - d) / 2.0))
        ahi = evt + int(math.floor((span + d) / 2.0))
    else:
        alo = evt
        ahi = lvt
    lo = est if est > alo else alo
    hi_t = let if let < ahi else ahi
    if hi_t - lo < dur:
        return 0, 0, False
    return lo, hi_t - dur, True


@njit(cache=True)
def _tran(delta, gf, gb, gp, gm, f1, b1, p1, m1, f2, b2, p2, m2):
    """Transition seconds between two parameter sets on one satellite."""
    t = delta
    if f1 != f2 and gf > t:
        t = gf
    if b1 != b2 and gb > t:
        t = gb
    if p1 != p2 and gp > t:
        t = gp
    if m1 != m2 and gm > t:
        t = gm
    return t


@njit(cache=True)
def _place(occ_st, occ_et, occ_f, occ_b, occ_p, occ_m, cnt,
           lo, hi, bst, dur, f, b, p, m,
           delta, gf, gb, gp, gm):
    """Find a start time for a new interval among sorted occupants.

    Gap g sits between occupants g-1 and g (g = 0 before the first,
    g = cnt after the last).  Tries bst in its own gap, then the earliest
    feasible start to the right, then the latest feasible start to the
    left.  Returns (start, insert_pos) or (-1, -1) when nothing fits.
    """
    # Binary search: first occupant with st > bst.
    g0 = 0
    right = cnt
    while g0 < right:
        mid = (g0 + right) // 2
        if occ_st[mid] <= bst:
            g0 = mid + 1
        else:
            right = mid

    # Earliest/latest start inside gap g, clamped to the trimmed span.
    for g in range(g0, cnt + 1):
        e = lo
        if g > 0:
            shifted = occ_et[g - 1] + _tran(
                delta, gf, gb, gp, gm,
                occ_f[g - 1], occ_b[g - 1], occ_p[g - 1], occ_m[g - 1],
                f, b, p, m,
            )
            if shifted > e:
                e = shifted
        l = hi
        if g < cnt:
            limit = occ_st[g] - _tran(
                delta, gf, gb, gp, gm,
                f, b, p, m,
                occ_f[g], occ_b[g], occ_p[g], occ_m[g],
            ) - dur
            if limit < l:
                l = limit
        if g == g0 and e <= bst <= l:
            return bst, g
        if g == g0 and bst < e <= l:
            return e, g
        if g > g0 and e <= l:
            return e, g

    for g in range(g0, -1, -1):
        e = lo
        if g > 0:
            shifted = occ_et[g - 1] + _tran(
                delta, gf, gb, gp, gm,
                occ_f[g - 1], occ_b[g - 1], occ_p[g - 1], occ_m[g - 1],
                f, b, p, m,
            )
            if shifted > e:
                e = shifted
        l = hi
        if g < cnt:
            limit = occ_st[g] - _tran(
                delta, gf, gb, gp, gm,
                f, b, p, m,
                occ_f[g], occ_b[g], occ_p[g], occ_m[g],
            ) - dur
            if limit < l:
                l = limit
        if g == g0:
            l = l if l < bst else bst
        if e <= l:
            return l, g
    return -1, -1


@njit(cache=True)
def _commit(occ_st, occ_et, occ_f, occ_b, occ_p, occ_m, cnt, pos,
            start, dur, f, b, p, m):
    """Insert an interval at gap position pos, keeping occupants sorted."""
    for j in range(cnt, pos, -1):
        occ_st[j] = occ_st[j - 1]
        occ_et[j] = occ_et[j - 1]
        occ_f[j] = occ_f[j - 1]
        occ_b[j] = occ_b[j - 1]
        occ_p[j] = occ_p[j - 1]
        occ_m[j] = occ_m[j - 1]
    occ_st[pos] = start
    occ_et[pos] = start + dur
    occ_f[pos] = f
    occ_b[pos] = b
    occ_p[pos] = p
    occ_m[pos] = m


@njit(cache=True)
def _decode_kernel(order,
                   est, let, dur, theta_max, profit,
                   fre, band, pol, mode, bw_value,
                   win_off, win_sat, win_orb, win_evt, win_lvt, win_theta,
                   orb_cap,
                   sat_beta, sat_gfre, sat_gband, sat_gpol, sat_gmode, sat_delta,
                   occ_cap,
                   out_task, out_win, out_st):
    """Decode a task-index permutation into assignment buffers.

    Returns (count, total_profit); out_task/out_win/out_st hold one entry
    per scheduled task in placement order.
    """
    n_orb = orb_cap.size
    occ_st = np.empty((n_orb, occ_cap), dtype=np.int64)
    occ_et = np.empty((n_orb, occ_cap), dtype=np.int64)
    occ_f = np.empty((n_orb, occ_cap), dtype=np.int64)
    occ_b = np.empty((n_orb, occ_cap), dtype=np.int64)
    occ_p = np.empty((n_orb, occ_cap), dtype=np.int64)
    occ_m = np.empty((n_orb, occ_cap), dtype=np.int64)
    occ_cnt = np.zeros(n_orb, dtype=np.int64)
    orb_used = np.zeros(n_orb, dtype=np.int64)

    count = 0
    total = 0
    for i in range(order.size):
        t = order[i]
        for w in range(win_off[t], win_off[t + 1]):
            o = win_orb[w]
            s = win_sat[w]
            data = sat_beta[s] * bw_value[t] * dur[t]
            if orb_used[o] + data > orb_cap[o]:
                continue
            lo, hi, ok = _trim(
                win_evt[w], win_lvt[w], est[t], let[t], dur[t],
                theta_max[t], win_theta[w],
            )
            if not ok:
                continue
            bst = (win_evt[w] + win_lvt[w] - dur[t]) // 2
            if bst < lo:
                bst = lo
            elif bst > hi:
                bst = hi
            start, pos = _place(
                occ_st[o], occ_et[o], occ_f[o], occ_b[o], occ_p[o], occ_m[o],
                occ_cnt[o], lo, hi, bst, dur[t],
                fre[t], band[t], pol[t], mode[t],
                sat_delta[s], sat_gfre[s], sat_gband[s], sat_gpol[s], sat_gmode[s],
            )
            if start < 0:
                continue
            _commit(
                occ_st[o], occ_et[o], occ_f[o], occ_b[o], occ_p[o], occ_m[o],
                occ_cnt[o], pos, start, dur[t],
                fre[t], band[t], pol[t], mode[t],
            )
            occ_cnt[o] += 1
            orb_used[o] += data
            out_task[count] = t
            out_win[count] = w
            out_st[count] = start
            count += 1
            total += profit[t]
            break
    return count, total


def trim_window(task: Task, window: TimeWindow) -> TrimmedWindow | None:
    """Stage-1 filter: clip a window by time range and angle limit.

    Returns None when the trimmed span cannot hold the task duration.
    """
    lo, hi, ok = _trim(
        window.evt, window.lvt, task.est, task.let, task.dur,
        task.theta_max, window.theta_peak,
    )
    if not ok:
        return None
    return TrimmedWindow(aevt=int(lo), alvt=int(hi) + task.dur)


def best_start(trimmed: TrimmedWindow, window: TimeWindow, dur: int) -> int:
    """Preferred start time: window center, clamped into the trimmed span."""
    bst = (window.evt + window.lvt - dur) // 2
    return max(trimmed.aevt, min(bst, trimmed.alvt - dur))


class Timeline:
    """Mutable occupancy state of all satellite orbits during one decode.

    Tracks, per orbit, the sorted occupied intervals with their observation
    parameters and the storage budget already spent.  Confined to a single
    decode session; not thread safe.
    """

    def __init__(self, instance: Instance) -> None:
        self.instance = instance
        arr = instance.arrays
        self.arr = arr
        n_orb, cap = arr.n_orbits, arr.occ_cap
        self.occ_st = np.empty((n_orb, cap), dtype=np.int64)
        self.occ_et = np.empty((n_orb, cap), dtype=np.int64)
        self.occ_f = np.empty((n_orb, cap), dtype=np.int64)
        self.occ_b = np.empty((n_orb, cap), dtype=np.int64)
        self.occ_p = np.empty((n_orb, cap), dtype=np.int64)
        self.occ_m = np.empty((n_orb, cap), dtype=np.int64)
        self.occ_cnt = np.zeros(n_orb, dtype=np.int64)
        self.orb_used = np.zeros(n_orb, dtype=np.int64)

    def storage_left(self, sat: int, orbit: int) -> int:
        o = self.arr.orbkey_to_oidx[(sat, orbit)]
        return int(self.arr.orb_cap[o] - self.orb_used[o])

    def place_task(
        self, task: Task, window: TimeWindow, trimmed: TrimmedWindow
    ) -> Assignment | None:
        """Commit the task into the window as close to its center as fits.

        Checks orbit storage, then searches around the best start among
        existing occupants; on success the interval is recorded and storage
        debited.  Returns None when no feasible start exists.
        """
        arr = self.arr
        t = arr.id_to_tidx[task.id]
        s = arr.sid_to_sidx[window.sat]
        o = arr.orbkey_to_oidx[(window.sat, window.orbit)]
        data = int(arr.beta[s] * arr.bw_value[t] * task.dur)
        if self.orb_used[o] + data > arr.orb_cap[o]:
            return None
        bst = best_start(trimmed, window, task.dur)
        start, pos = _place(
            self.occ_st[o], self.occ_et[o], self.occ_f[o], self.occ_b[o],
            self.occ_p[o], self.occ_m[o], int(self.occ_cnt[o]),
            trimmed.aevt, trimmed.alvt - task.dur, bst, task.dur,
            task.fre, task.band, task.pol, task.mode,
            int(arr.delta[s]), int(arr.gfre[s]), int(arr.gband[s]),
            int(arr.gpol[s]), int(arr.gmode[s]),
        )
        if start < 0:
            return None
        _commit(
            self.occ_st[o], self.occ_et[o], self.occ_f[o], self.occ_b[o],
            self.occ_p[o], self.occ_m[o], int(self.occ_cnt[o]), int(pos),
            int(start), task.dur, task.fre, task.band, task.pol, task.mode,
        )
        self.occ_cnt[o] += 1
        self.orb_used[o] += data
        return Assignment(
            task=task.id, sat=window.sat, orbit=window.orbit, window=window.k,
            st=int(start), et=int(start) + task.dur, data=data,
        )


class Decoder:
    """Reusable decode session for one instance.

    Holds the columnar arrays and preallocated output buffers; each
    ``decode_profit`` call runs the compiled kernel once.  ``calls`` counts
    kernel invocations (the solver's evaluation budget).  Not thread safe.
    """

    def __init__(self, instance: Instance) -> None:
        self.instance = instance
        self.arr = instance.arrays
        n = self.arr.n_tasks
        self._out_task = np.empty(n, dtype=np.int64)
        self._out_win = np.empty(n, dtype=np.int64)
        self._out_st = np.empty(n, dtype=np.int64)
        self._count = 0
        self.calls = 0
        ids = self.arr.task_ids
        self._contiguous = bool((ids == np.arange(n, dtype=np.int64)).all())

    def order_from_ids(self, order_ids: Sequence[int] | np.ndarray) -> np.ndarray:
        """Translate a task-id permutation into index space, validating it."""
        arr = self.arr
        n = arr.n_tasks
        order = np.asarray(order_ids, dtype=np.int64)
        if order.shape != (n,):
            raise ValueError(f"order has {order.size} entries, instance has {n} tasks")
        if self._contiguous:
            counts = np.bincount(order, minlength=n) if order.size else np.zeros(n)
            if order.size and (order.min() < 0 or order.max() >= n or (counts != 1).any()):
                raise ValueError("order is not a permutation of task ids")
            return order
        try:
            idx = np.array([arr.id_to_tidx[int(i)] for i in order], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"order references unknown task {exc.args[0]}") from exc
        if np.unique(idx).size != n:
            raise ValueError("order is not a permutation of task ids")
        return idx

    def decode_profit(self, order_idx: np.ndarray) -> int:
        """Decode an index-space permutation; returns the plan profit."""
        arr = self.arr
        count, total = _decode_kernel(
            order_idx,
            arr.est, arr.let, arr.dur, arr.theta_max, arr.profit,
            arr.fre, arr.band, arr.pol, arr.mode, arr.bw_value,
            arr.win_off, arr.win_sat, arr.win_orb,
            arr.win_evt, arr.win_lvt, arr.win_theta,
            arr.orb_cap,
            arr.beta, arr.gfre, arr.gband, arr.gpol, arr.gmode, arr.delta,
            arr.occ_cap,
            self._out_task, self._out_win, self._out_st,
        )
        self._count = int(count)
        self.calls += 1
        return int(total)

    def snapshot(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Copy the assignment buffers of the most recent decode."""
        c = self._count
        return (
            self._out_task[:c].copy(),
            self._out_win[:c].copy(),
            self._out_st[:c].copy(),
        )

    def build_plan(
        self, snapshot: tuple[np.ndarray, np.ndarray, np.ndarray], profit: int
    ) -> Plan:
        """Materialize a Plan from snapshot buffers."""
        arr = self.arr
        tasks, wins, starts = snapshot
        assignments = []
        for t, w, st in zip(tasks, wins, starts):
            t = int(t)
            w = int(w)
            st = int(st)
            s = int(arr.win_sat[w])
            o = int(arr.win_orb[w])
            assignments.append(
                Assignment(
                    task=int(arr.task_ids[t]),
                    sat=int(arr.sat_ids[s]),
                    orbit=int(arr.orb_id[o]),
                    window=int(arr.win_k[w]),
                    st=st,
                    et=st + int(arr.dur[t]),
                    data=int(arr.beta[s] * arr.bw_value[t] * arr.dur[t]),
                )
            )
        return Plan(assignments=tuple(assignments), profit=int(profit))

    def decode(self, order_ids: Sequence[int] | np.ndarray) -> Plan:
        """Decode a task-id permutation into a feasible Plan."""
        idx = self.order_from_ids(order_ids)
        total = self.decode_profit(idx)
        return self.build_plan(self.snapshot(), total)


def decode(individual: Sequence[int] | np.ndarray, instance: Instance) -> Plan:
    """Decode a task-id permutation into a feasible Plan for the instance.

    Convenience wrapper creating a one-shot session; solvers reuse a
    ``Decoder`` to amortize buffer setup across thousands of calls.
    """
    order = getattr(individual, "order", individual)
    return Decoder(instance).decode(order)
