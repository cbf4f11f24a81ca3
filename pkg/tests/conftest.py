"""Shared fixtures and small construction helpers for the test suite."""

from __future__ import annotations

import pytest

from edssp.instgen import GenSpec, generate_instance
from edssp.model import Instance, Orbit, Satellite, Task, TimeWindow


def mk_task(
    id: int = 0,
    *,
    est: int = 0,
    let: int = 5000,
    dur: int = 20,
    theta_max: float = 10.0,
    degree: int = 80,
    profit: int = 10,
    fre: int = 0,
    pol: int = 0,
    mode: int = 0,
) -> Task:
    return Task(
        id=id, est=est, let=let, dur=dur, theta_max=theta_max,
        degree=degree, profit=profit, fre=fre, pol=pol, mode=mode,
    )


def mk_sat(
    id: int = 0,
    *,
    storage: int = 10**9,
    beta: int = 1,
    gamma_fre: int = 30,
    gamma_band: int = 20,
    gamma_pol: int = 25,
    gamma_mode: int = 40,
    delta: int = 5,
    orbits: tuple[tuple[int, int, int], ...] = ((0, 0, 5000),),
) -> Satellite:
    return Satellite(
        id=id, antenna_diameter=1.5, antenna_efficiency=0.6,
        storage_capacity=storage, beta=beta,
        gamma_fre=gamma_fre, gamma_band=gamma_band,
        gamma_pol=gamma_pol, gamma_mode=gamma_mode, delta=delta,
        orbits=tuple(Orbit(id=o, start=s, end=e) for o, s, e in orbits),
    )


def mk_win(
    sat: int = 0,
    task: int = 0,
    orbit: int = 0,
    k: int = 0,
    *,
    evt: int = 0,
    lvt: int = 1000,
    theta_peak: float = 10.0,
) -> TimeWindow:
    return TimeWindow(
        sat=sat, task=task, orbit=orbit, k=k, evt=evt, lvt=lvt,
        theta_peak=theta_peak,
    )


def mk_instance(tasks, sats=None, wins=(), **kwargs) -> Instance:
    if sats is None:
        sats = [mk_sat()]
    return Instance(
        tasks=tuple(tasks), satellites=tuple(sats), windows=tuple(wins), **kwargs
    )


@pytest.fixture(scope="session")
def gen_instance_small() -> Instance:
    """A generated 40-task instance shared by read-only tests."""
    return generate_instance(GenSpec(n_tasks=40, n_sats=2, seed=3))


@pytest.fixture(scope="session")
def gen_instance_medium() -> Instance:
    """A generated 120-task instance shared by read-only tests."""
    return generate_instance(GenSpec(n_tasks=120, n_sats=2, seed=11))
