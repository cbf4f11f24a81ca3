"""Reference algorithms the main solver is benchmarked against.

cha decodes tasks greedily in profit order; classic_ga shares the solver's
loop shape and evaluation budget but picks operators with fixed
probabilities instead of Q-learning and keeps no elite.
"""

from __future__ import annotations

import time

import numpy as np

from .decoder import Decoder
from .model import Instance, Plan
from .rlga import ACTIONS, RunResult, SolverConfig, _apply_action_idx, roulette_select

CROSSOVER_PROB = 0.9
MUTATION_PROB = 0.1

_C1 = ACTIONS[0]
_M = ACTIONS[7]


def cha(instance: Instance) -> Plan:
    """Construction heuristic: decode tasks by profit descending, id ascending."""
    dec = Decoder(instance)
    arr = instance.arrays
    order = np.lexsort((arr.task_ids, -arr.profit))
    total = dec.decode_profit(order.astype(np.int64))
    return dec.build_plan(dec.snapshot(), total)


def classic_ga(instance: Instance, cfg: SolverConfig) -> RunResult:
    """Fixed-probability genetic algorithm with the solver's budget accounting.

    Each offspring comes from a roulette-selected parent, crossed over with
    probability 0.9 and mutated with probability 0.1 (independent draws),
    then decoded into its slot.  No Q-learning, no elite retention.
    """
    t0 = time.perf_counter()
    dec = Decoder(instance)
    rng = np.random.default_rng(cfg.seed)
    est, dur = dec.arr.est, dec.arr.dur
    n = dec.arr.n_tasks
    npop = cfg.np

    orders = [rng.permutation(n).astype(np.int64) for _ in range(npop)]
    fits = np.empty(npop, dtype=np.int64)
    trace = np.empty(npop + cfg.mfe, dtype=np.int64)
    best = -1
    best_snap = None
    for p in range(npop):
        f = dec.decode_profit(orders[p])
        fits[p] = f
        if f > best:
            best = f
            best_order = orders[p].copy()
            best_snap = dec.snapshot()
        trace[p] = best

    num_eval = 0
    while num_eval < cfg.mfe:
        for p in range(npop):
            if num_eval >= cfg.mfe:
                break
            pi = roulette_select(fits, rng)
            child = orders[pi].copy()
            if rng.random() < CROSSOVER_PROB:
                child = _apply_action_idx(child, _C1, cfg.seg_len, est, dur, rng)
            if rng.random() < MUTATION_PROB:
                child = _apply_action_idx(child, _M, cfg.seg_len, est, dur, rng)
            f = dec.decode_profit(child)
            num_eval += 1
            orders[p] = child
            fits[p] = f
            if f > best:
                best = f
                best_order = child.copy()
                best_snap = dec.snapshot()
            trace[npop + num_eval - 1] = best

    plan = dec.build_plan(best_snap, best)
    ids = dec.arr.task_ids[best_order]
    return RunResult(
        algorithm="classic_ga",
        seed=cfg.seed,
        best_profit=int(best),
        best_order=tuple(int(i) for i in ids),
        plan=plan,
        trace=trace,
        qtable=None,
        evaluations=dec.calls,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )


def rlga_we(instance: Instance, cfg: SolverConfig) -> RunResult:
    """Main solver with elite retention disabled (ablation variant)."""
    from .rlga import run

    return run(instance, cfg, elite=False, algorithm="rlga_we")
