"""Q-learning guided genetic algorithm over task permutations.

A single Q-learning agent with two states (whether the last offspring
improved on its parent) picks among 15 evolution actions: seven segment
crossovers C1..C7, one swap mutation M, and the seven crossover+mutation
combinations.  Parents are roulette-selected by fitness, each offspring
overwrites its population slot, and the global best individual is
re-injected over the worst slot while a non-improvement counter stays
below a threshold.  Termination is by decoded-offspring budget.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .decoder import Decoder
from .model import Instance, Plan, plan_to_dict

N_STATES = 2
N_ACTIONS = 15
STATE_IMPROVED = 0
STATE_NOT_IMPROVED = 1


@dataclass(frozen=True, slots=True)
class Action:
    """One evolution action: optional crossover C1..C7, optional mutation."""

    index: int
    crossover: int | None
    mutate: bool


def _build_actions() -> tuple[Action, ...]:
    actions = [Action(i, i + 1, False) for i in range(7)]
    actions.append(Action(7, None, True))
    actions.extend(Action(8 + i, i + 1, True) for i in range(7))
    return tuple(actions)


ACTIONS: tuple[Action, ...] = _build_actions()


@dataclass
class QTable:
    """Action-value table: 2 states x 15 actions, zero-initialized."""

    values: np.ndarray = field(
        default_factory=lambda: np.zeros((N_STATES, N_ACTIONS), dtype=np.float64)
    )

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (N_STATES, N_ACTIONS):
            raise ValueError(
                f"Q-table must be {N_STATES}x{N_ACTIONS}, got {self.values.shape}"
            )


@dataclass(frozen=True)
class Individual:
    """A candidate solution: task-id permutation plus its decoded profit."""

    order: tuple[int, ...]
    fitness: int


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters; defaults follow the reference configuration."""

    np: int = 10
    mfe: int = 5000
    alpha: float = 0.01
    gamma: float = 0.95
    temp: float = 1000.0
    eps: float = 0.01
    thre: int = 100
    seg_len: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.np < 2:
            raise ValueError(f"np must be >= 2, got {self.np}")
        if self.mfe < self.np:
            raise ValueError(f"mfe must be >= np, got {self.mfe}")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if self.temp <= 0:
            raise ValueError(f"temp must be positive, got {self.temp}")
        if not 0 <= self.eps < 1:
            raise ValueError(f"eps must be in [0, 1), got {self.eps}")
        if self.thre < 0:
            raise ValueError(f"thre must be non-negative, got {self.thre}")
        if self.seg_len < 1:
            raise ValueError(f"seg_len must be >= 1, got {self.seg_len}")


@dataclass
class RunResult:
    """Outcome of one solver run."""

    algorithm: str
    seed: int
    best_profit: int
    best_order: tuple[int, ...]
    plan: Plan
    trace: np.ndarray
    qtable: np.ndarray | None
    evaluations: int
    elapsed_ms: float

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        """Serializable form; timing is opt-in so outputs stay reproducible."""
        doc: dict[str, Any] = {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "best_profit": self.best_profit,
            "best_order": list(self.best_order),
            "plan": plan_to_dict(self.plan),
            "trace": [[i + 1, int(v)] for i, v in enumerate(self.trace)],
            "qtable": None if self.qtable is None else self.qtable.tolist(),
            "evaluations": self.evaluations,
        }
        if include_timing:
            doc["elapsed_ms"] = self.elapsed_ms
        return doc


def softmax_probs(qrow: np.ndarray, temp: float) -> np.ndarray:
    """Softmax with temperature over the last axis, max-subtracted.

    Accepts a single row or a batch of rows; each row sums to 1.
    """
    if temp <= 0:
        raise ValueError(f"temp must be positive, got {temp}")
    q = np.asarray(qrow, dtype=np.float64)
    z = (q - q.max(axis=-1, keepdims=True)) / temp
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def select_action(
    qtable: QTable, state: int, cfg: SolverConfig, rng: np.random.Generator
) -> Action:
    """Pick an action: epsilon-random, otherwise softmax over the state row."""
    if state not in (STATE_IMPROVED, STATE_NOT_IMPROVED):
        raise ValueError(f"invalid state {state}")
    if rng.random() < cfg.eps:
        return ACTIONS[int(rng.integers(N_ACTIONS))]
    probs = softmax_probs(qtable.values[state], cfg.temp)
    r = rng.random()
    idx = int(np.searchsorted(np.cumsum(probs), r, side="right"))
    return ACTIONS[min(idx, N_ACTIONS - 1)]


def roulette_select(
    fitnesses: Sequence[int] | np.ndarray, rng: np.random.Generator
) -> int:
    """Fitness-proportional index selection; uniform when all are zero."""
    fits = np.asarray(fitnesses, dtype=np.int64)
    if fits.size == 0:
        raise ValueError("cannot select from empty fitness list")
    if (fits < 0).any():
        raise ValueError("fitnesses must be non-negative")
    total = int(fits.sum())
    if total == 0:
        return int(rng.integers(fits.size))
    u = rng.random() * total
    return int(np.searchsorted(np.cumsum(fits), u, side="right"))


def reward(f_t: int, f_prev: int) -> float:
    """Reward of an evolution step: offspring fitness minus parent fitness."""
    return float(f_t - f_prev)


def q_update(
    qtable: QTable,
    state: int,
    action: Action | int,
    r: float,
    next_state: int,
    cfg: SolverConfig,
) -> QTable:
    """Temporal-difference update of one Q-table entry, in place."""
    idx = action.index if isinstance(action, Action) else int(action)
    q = qtable.values
    best_next = q[next_state].max()
    q[state, idx] += cfg.alpha * (r + cfg.gamma * best_next - q[state, idx])
    return qtable


# ---------------------------------------------------------------------------
# Operators (index-space orders; est/dur indexed by task position)
# ---------------------------------------------------------------------------

def _swap_segments(order: np.ndarray, length: int, rng: np.random.Generator) -> None:
    n = order.size
    length = min(length, n // 2)
    if length < 1:
        return
    hi = n - length + 1
    s1 = s2 = 0
    for _ in range(32):
        s1 = int(rng.integers(hi))
        s2 = int(rng.integers(hi))
        if abs(s1 - s2) >= length:
            break
    else:
        s1, s2 = 0, length
    tmp = order[s1:s1 + length].copy()
    order[s1:s1 + length] = order[s2:s2 + length]
    order[s2:s2 + length] = tmp


def _reverse_segment(order: np.ndarray, length: int, rng: np.random.Generator) -> None:
    n = order.size
    length = min(length, n)
    s = int(rng.integers(n - length + 1))
    order[s:s + length] = order[s:s + length][::-1]


def _swap_with_prefix(order: np.ndarray, length: int, rng: np.random.Generator) -> None:
    n = order.size
    length = min(length, n // 2)
    if length < 1:
        return
    s = int(rng.integers(length, n - length + 1))
    tmp = order[:length].copy()
    order[:length] = order[s:s + length]
    order[s:s + length] = tmp


def _sort_segment(
    order: np.ndarray, length: int, key: np.ndarray, rng: np.random.Generator
) -> None:
    n = order.size
    length = min(length, n)
    s = int(rng.integers(n - length + 1))
    seg = order[s:s + length]
    order[s:s + length] = seg[np.argsort(key[seg], kind="stable")]


def _swap_mutation(order: np.ndarray, rng: np.random.Generator) -> None:
    n = order.size
    if n < 2:
        return
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    if j >= i:
        j += 1
    order[i], order[j] = order[j], order[i]


def _apply_action_idx(
    parent: np.ndarray,
    action: Action,
    seg_len: int,
    est: np.ndarray,
    dur: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Apply one evolution action to a copy of the parent order."""
    child = parent.copy()
    c = action.crossover
    if c == 1:
        _swap_segments(child, seg_len, rng)
    elif c == 2:
        _swap_segments(child, 2 * seg_len, rng)
    elif c == 3:
        _swap_segments(child, 3 * seg_len, rng)
    elif c == 4:
        _reverse_segment(child, seg_len, rng)
    elif c == 5:
        _swap_with_prefix(child, seg_len, rng)
    elif c == 6:
        _sort_segment(child, seg_len, est, rng)
    elif c == 7:
        _sort_segment(child, seg_len, dur, rng)
    if action.mutate:
        _swap_mutation(child, rng)
    return child


def apply_operator(
    individual: Individual,
    action: Action,
    cfg: SolverConfig,
    instance: Instance,
    rng: np.random.Generator,
) -> Individual:
    """Apply an action to an individual, returning the evaluated offspring."""
    dec = Decoder(instance)
    parent_idx = dec.order_from_ids(individual.order)
    child_idx = _apply_action_idx(
        parent_idx, action, cfg.seg_len, dec.arr.est, dec.arr.dur, rng
    )
    fitness = dec.decode_profit(child_idx)
    ids = dec.arr.task_ids[child_idx]
    return Individual(order=tuple(int(i) for i in ids), fitness=int(fitness))


# ---------------------------------------------------------------------------
# Main loop
# ---------------------------------------------------------------------------

def run(
    instance: Instance,
    cfg: SolverConfig,
    *,
    elite: bool = True,
    algorithm: str | None = None,
    on_generation: Any | None = None,
) -> RunResult:
    """Run the solver on an instance.

    Seeds a random population, then repeatedly: observe whether the last
    step improved, pick an action via the Q-table, roulette-select a parent,
    apply the operator, decode the offspring into slot p, reward the agent
    with the fitness difference.  After each generation the global best is
    refreshed or, failing improvement, re-injected over the worst slot while
    the stagnation counter is below cfg.thre.  Stops after cfg.mfe offspring
    evaluations; total decodes are exactly cfg.np + cfg.mfe.

    on_generation, if given, is called after every generation with
    (generation_index, fitness array copy, global_best); instrumentation
    only, it does not influence the run.
    """
    t0 = time.perf_counter()
    name = algorithm or ("rlga" if elite else "rlga_we")
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

    qtable = QTable()
    state = STATE_NOT_IMPROVED
    global_best = best
    global_best_order = best_order.copy()
    last_local_best = 0
    count = 0
    num_eval = 0
    generation = 0

    while num_eval < cfg.mfe:
        for p in range(npop):
            if num_eval >= cfg.mfe:
                break
            action = select_action(qtable, state, cfg, rng)
            pi = roulette_select(fits, rng)
            child = _apply_action_idx(orders[pi], action, cfg.seg_len, est, dur, rng)
            f = dec.decode_profit(child)
            num_eval += 1
            r = reward(f, int(fits[pi]))
            next_state = STATE_IMPROVED if r > 0 else STATE_NOT_IMPROVED
            q_update(qtable, state, action, r, next_state, cfg)
            state = next_state
            orders[p] = child
            fits[p] = f
            if f > best:
                best = f
                best_order = child.copy()
                best_snap = dec.snapshot()
            trace[npop + num_eval - 1] = best

        local_best = int(fits.max())
        if local_best > global_best:
            global_best = local_best
            global_best_order = orders[int(np.argmax(fits))].copy()
        elif elite and count < cfg.thre:
            wi = int(np.argmin(fits))
            orders[wi] = global_best_order.copy()
            fits[wi] = global_best
        if local_best <= last_local_best:
            count += 1
        last_local_best = local_best
        if on_generation is not None:
            on_generation(generation, fits.copy(), global_best)
        generation += 1

    plan = dec.build_plan(best_snap, best)
    ids = dec.arr.task_ids[best_order]
    return RunResult(
        algorithm=name,
        seed=cfg.seed,
        best_profit=int(best),
        best_order=tuple(int(i) for i in ids),
        plan=plan,
        trace=trace,
        qtable=qtable.values.copy(),
        evaluations=dec.calls,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )
