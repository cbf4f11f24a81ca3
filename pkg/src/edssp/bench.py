"""Experiment harness: repeated solver runs, statistics and result tables.

For every (instance, algorithm) pair the harness executes ``runs``
independent runs with consecutive seeds, re-validates each emitted plan,
and aggregates best/mean/sample-std plus a two-sided rank-sum p-value
against the reference algorithm.  Result tables are CSV with a fixed
header; convergence traces are two-column CSV files downsampled to at
most 500 points.  Wall-clock milliseconds appear only in the results
table, never in raw results or traces, so those stay byte-reproducible.
"""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import baselines, rlga
from .decoder import Decoder
from .instgen import GenSpec, generate_instance
from .model import Instance, Plan, canonical_json, load_instance, validate_plan
from .rlga import RunResult, SolverConfig

CSV_HEADER = "instance,algorithm,best,mean,std_dev,p_value,mean_cpu_ms"
ALGORITHMS = ("rlga", "rlga_we", "classic_ga", "cha")
REFERENCE = "rlga"
TRACE_POINTS = 500


@dataclass(frozen=True)
class ExperimentConfig:
    """What to run: instances, algorithms, repetitions and solver settings.

    Instances may be file paths, GenSpecs, or preloaded (name, Instance)
    pairs.  Per-run seeds are base_seed .. base_seed + runs - 1.
    """

    instances: tuple[Any, ...]
    algorithms: tuple[str, ...] = ("rlga", "classic_ga", "cha")
    runs: int = 30
    base_seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    out_dir: Path | None = None

    def __post_init__(self) -> None:
        if not self.instances:
            raise ValueError("experiment needs at least one instance")
        if not self.algorithms:
            raise ValueError("experiment needs at least one algorithm")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")


@dataclass(frozen=True)
class StatRow:
    """One line of the results table."""

    instance: str
    algorithm: str
    best: int
    mean: float
    std_dev: float
    p_value: float | None
    mean_cpu_ms: float | None

    def __post_init__(self) -> None:
        if self.std_dev < 0:
            raise ValueError("std_dev must be non-negative")
        if self.best < self.mean - 6 * self.std_dev - 1e-9:
            raise ValueError(
                f"inconsistent stats: best {self.best} below mean - 6*std "
                f"({self.mean} - 6*{self.std_dev})"
            )


@dataclass
class ExperimentResult:
    rows: list[StatRow]
    raw: dict[str, Any]
    traces: dict[tuple[str, str], list[np.ndarray]]
    errors: list[tuple[str, str]]


def rank_sum_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """Two-sided Mann-Whitney U p-value, normal approximation with ties.

    Both samples need at least 5 values; returns 1.0 when every value is
    identical (zero variance).  Symmetric in its arguments.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    na, nb = a.size, b.size
    if na < 5 or nb < 5:
        raise ValueError(f"samples must have >= 5 values, got {na} and {nb}")
    combined = np.concatenate([a, b])
    n = na + nb
    order = np.argsort(combined, kind="mergesort")
    ranks = np.empty(n, dtype=np.float64)
    svals = combined[order]
    tie_term = 0.0
    i = 0
    while i < n:
        j = i
        while j + 1 < n and svals[j + 1] == svals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        t = j - i + 1
        if t > 1:
            tie_term += t**3 - t
        i = j + 1
    r_a = float(ranks[:na].sum())
    u_a = r_a - na * (na + 1) / 2.0
    mean_u = na * nb / 2.0
    var_u = na * nb / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var_u <= 0:
        return 1.0
    z = (u_a - mean_u) / math.sqrt(var_u)
    p = math.erfc(abs(z) / math.sqrt(2.0))
    return min(1.0, max(0.0, p))


def downsample_trace(trace: np.ndarray, limit: int = TRACE_POINTS) -> np.ndarray:
    """Indices-based downsampling keeping first and last evaluation."""
    trace = np.asarray(trace)
    if trace.size <= limit:
        idx = np.arange(trace.size)
    else:
        idx = np.unique(np.round(np.linspace(0, trace.size - 1, limit)).astype(np.int64))
    return np.stack([idx + 1, trace[idx]], axis=1)


def resolve_instance(ref: Any, position: int) -> tuple[str, Instance]:
    """Turn an instance reference (path, GenSpec, pair) into (name, Instance)."""
    if isinstance(ref, GenSpec):
        name = f"{ref.n_tasks}x{ref.n_sats}-s{ref.seed}"
        return name, generate_instance(ref)
    if isinstance(ref, (str, Path)):
        return Path(ref).stem, load_instance(ref)
    if isinstance(ref, tuple) and len(ref) == 2 and isinstance(ref[1], Instance):
        return str(ref[0]), ref[1]
    if isinstance(ref, Instance):
        return f"instance-{position}", ref
    raise ValueError(f"cannot interpret instance reference {ref!r}")


def _run_algorithm(
    name: str, instance: Instance, cfg: SolverConfig
) -> tuple[int, np.ndarray, float, Plan]:
    """Execute one run; returns (profit, trace, cpu_ms, plan)."""
    if name == "rlga":
        r = rlga.run(instance, cfg)
    elif name == "rlga_we":
        r = baselines.rlga_we(instance, cfg)
    elif name == "classic_ga":
        r = baselines.classic_ga(instance, cfg)
    elif name == "cha":
        t0 = time.perf_counter()
        plan = baselines.cha(instance)
        ms = (time.perf_counter() - t0) * 1000.0
        return plan.profit, np.array([plan.profit], dtype=np.int64), ms, plan
    else:
        raise ValueError(f"unknown algorithm {name}")
    return r.best_profit, r.trace, r.elapsed_ms, r.plan


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run the full experiment grid and aggregate statistics.

    Runs execute sequentially in seed order; emitted plans are re-validated
    and any infeasibility raises immediately.  Unloadable instances produce
    an error row and the remaining instances still run.
    """
    rows: list[StatRow] = []
    errors: list[tuple[str, str]] = []
    traces: dict[tuple[str, str], list[np.ndarray]] = {}
    raw_instances: dict[str, Any] = {}

    reference = REFERENCE if REFERENCE in cfg.algorithms else cfg.algorithms[0]

    for pos, ref in enumerate(cfg.instances):
        try:
            name, instance = resolve_instance(ref, pos)
        except ValueError as exc:
            name = ref if isinstance(ref, str) else f"instance-{pos}"
            errors.append((str(name), str(exc)))
            rows.append(
                StatRow(
                    instance=str(name), algorithm="error", best=0,
                    mean=0.0, std_dev=0.0, p_value=None, mean_cpu_ms=None,
                )
            )
            continue

        profits: dict[str, list[int]] = {}
        cpu: dict[str, list[float]] = {}
        for algo in cfg.algorithms:
            profits[algo] = []
            cpu[algo] = []
            traces[(name, algo)] = []
            for i in range(cfg.runs):
                run_cfg = dataclasses.replace(cfg.solver, seed=cfg.base_seed + i)
                profit, trace, ms, plan = _run_algorithm(algo, instance, run_cfg)
                report = validate_plan(instance, plan)
                if not report.feasible:
                    raise RuntimeError(
                        f"{algo} emitted an infeasible plan on {name}: "
                        f"{report.summary()}"
                    )
                profits[algo].append(int(profit))
                cpu[algo].append(float(ms))
                traces[(name, algo)].append(np.asarray(trace, dtype=np.int64))

        raw_instances[name] = {
            algo: {"profits": profits[algo]} for algo in cfg.algorithms
        }
        for algo in cfg.algorithms:
            vals = np.array(profits[algo], dtype=np.float64)
            if algo == reference or cfg.runs < 5:
                p_value = None
            else:
                p_value = rank_sum_test(profits[reference], profits[algo])
            rows.append(
                StatRow(
                    instance=name,
                    algorithm=algo,
                    best=int(vals.max()),
                    mean=float(vals.mean()),
                    std_dev=float(vals.std(ddof=1)) if cfg.runs > 1 else 0.0,
                    p_value=p_value,
                    mean_cpu_ms=float(np.mean(cpu[algo])),
                )
            )

    raw = {
        "algorithms": list(cfg.algorithms),
        "base_seed": cfg.base_seed,
        "runs": cfg.runs,
        "reference": reference,
        "solver": dataclasses.asdict(cfg.solver),
        "instances": raw_instances,
    }
    result = ExperimentResult(rows=rows, raw=raw, traces=traces, errors=errors)
    if cfg.out_dir is not None:
        write_outputs(result, Path(cfg.out_dir))
    return result


def stats_from_raw(raw: Mapping[str, Any]) -> list[StatRow]:
    """Recompute StatRows from a raw-results document (no timing data)."""
    if "instances" not in raw:
        raise ValueError("raw results document missing 'instances'")
    reference = raw.get("reference")
    rows: list[StatRow] = []
    for name, algos in raw["instances"].items():
        for algo, payload in algos.items():
            profits = payload.get("profits")
            if not profits:
                raise ValueError(f"raw results for {name}/{algo} missing profits")
            vals = np.array(profits, dtype=np.float64)
            if algo == reference or reference not in algos or len(profits) < 5:
                p_value = None
            else:
                ref_profits = algos[reference]["profits"]
                p_value = (
                    rank_sum_test(ref_profits, profits)
                    if len(ref_profits) >= 5
                    else None
                )
            rows.append(
                StatRow(
                    instance=str(name),
                    algorithm=str(algo),
                    best=int(vals.max()),
                    mean=float(vals.mean()),
                    std_dev=float(vals.std(ddof=1)) if len(profits) > 1 else 0.0,
                    p_value=p_value,
                    mean_cpu_ms=None,
                )
            )
    return rows


def format_rows(rows: Sequence[StatRow]) -> str:
    """Render StatRows as the fixed-header CSV table."""
    lines = [CSV_HEADER]
    for r in rows:
        p = "" if r.p_value is None else f"{r.p_value:.6g}"
        ms = "" if r.mean_cpu_ms is None else f"{r.mean_cpu_ms:.3f}"
        lines.append(
            f"{r.instance},{r.algorithm},{r.best},{r.mean:.6f},{r.std_dev:.6f},{p},{ms}"
        )
    return "\n".join(lines) + "\n"


def write_outputs(result: ExperimentResult, out_dir: Path) -> None:
    """Write results.csv, raw_results.json and per-run trace files."""
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "results.csv").write_text(format_rows(result.rows), encoding="utf-8")
    (out_dir / "raw_results.json").write_text(
        canonical_json(result.raw), encoding="utf-8"
    )
    trace_dir = out_dir / "traces"
    trace_dir.mkdir(exist_ok=True)
    base_seed = result.raw["base_seed"]
    for (iname, algo), runs in result.traces.items():
        for i, trace in enumerate(runs):
            pts = downsample_trace(trace)
            lines = ["eval,profit"]
            lines.extend(f"{int(e)},{int(p)}" for e, p in pts)
            path = trace_dir / f"{iname}_{algo}_seed{base_seed + i}.csv"
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
