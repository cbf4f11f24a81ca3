"""HTTP service exposing generation, solving, validation and benchmarking.

Request and response schemas mirror the core dataclasses one-to-one, so a
JSON instance file, the service payloads and the in-memory model stay
interchangeable.  Handlers are plain functions; the CLI calls them directly
in-process, and the same callables serve over HTTP via FastAPI.
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__, baselines, bench, rlga
from .instgen import GenSpec, generate_instance
from .model import (
    instance_from_dict,
    instance_to_dict,
    plan_from_dict,
    plan_to_dict,
    validate_plan,
)
from .rlga import SolverConfig

app = FastAPI(title="edssp", version=__version__)

ALGORITHM_NAMES = bench.ALGORITHMS


class TaskModel(BaseModel):
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


class OrbitModel(BaseModel):
    id: int
    start: int
    end: int


class SatelliteModel(BaseModel):
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
    orbits: list[OrbitModel]


class WindowModel(BaseModel):
    sat: int
    task: int
    orbit: int
    k: int
    evt: int
    lvt: int
    theta_peak: float


class AssignmentModel(BaseModel):
    task: int
    sat: int
    orbit: int
    window: int
    st: int
    et: int
    data: int


class PlanModel(BaseModel):
    assignments: list[AssignmentModel]
    profit: int


class InstanceModel(BaseModel):
    tasks: list[TaskModel]
    satellites: list[SatelliteModel]
    windows: list[WindowModel]
    bandwidth_units: dict[str, int] | None = None
    omega_intervals: dict[str, list[float]] | None = None
    gen_spec: dict[str, Any] | None = None


class GenSpecModel(BaseModel):
    n_tasks: int
    n_sats: int
    horizon: int = 86400
    seed: int = 0
    windows_per_task: tuple[int, int] = (1, 5)
    window_span: tuple[int, int] = (120, 600)
    semi_major_axis: float = 7000.0


class SolverOptions(BaseModel):
    np: int = 10
    mfe: int = 5000
    alpha: float = 0.01
    gamma: float = 0.95
    temp: float = 1000.0
    eps: float = 0.01
    thre: int = 100
    seg_len: int = 2
    seed: int = 0

    def to_config(self) -> SolverConfig:
        return SolverConfig(**self.model_dump())


class HealthResponse(BaseModel):
    status: str
    version: str


class GenerateRequest(BaseModel):
    spec: GenSpecModel


class GenerateResponse(BaseModel):
    instance: InstanceModel


class SolveRequest(BaseModel):
    instance: InstanceModel
    algorithm: str = "rlga"
    config: SolverOptions = Field(default_factory=SolverOptions)


class SolveResponse(BaseModel):
    algorithm: str
    seed: int
    best_profit: int
    evaluations: int
    plan: PlanModel
    trace: list[tuple[int, int]]
    qtable: list[list[float]] | None
    elapsed_ms: float


class ValidateRequest(BaseModel):
    instance: InstanceModel
    plan: PlanModel


class ViolationModel(BaseModel):
    kind: str
    message: str
    task: int | None = None
    sat: int | None = None
    orbit: int | None = None


class ValidateResponse(BaseModel):
    feasible: bool
    violations: list[ViolationModel]
    structural_errors: list[str]


class BenchmarkRequest(BaseModel):
    instances: list[InstanceModel] = Field(default_factory=list)
    names: list[str] | None = None
    gen_specs: list[GenSpecModel] = Field(default_factory=list)
    algorithms: list[str] = ["rlga", "classic_ga", "cha"]
    runs: int = 30
    base_seed: int = 0
    config: SolverOptions = Field(default_factory=SolverOptions)
    include_traces: bool = False


class StatRowModel(BaseModel):
    instance: str
    algorithm: str
    best: int
    mean: float
    std_dev: float
    p_value: float | None
    mean_cpu_ms: float | None


class BenchmarkResponse(BaseModel):
    rows: list[StatRowModel]
    raw: dict[str, Any]
    errors: list[tuple[str, str]]
    traces: dict[str, list[list[tuple[int, int]]]] | None = None


class StatsRequest(BaseModel):
    raw: dict[str, Any]


class StatsResponse(BaseModel):
    rows: list[StatRowModel]


def _instance_from_model(model: InstanceModel):
    try:
        return instance_from_dict(model.model_dump(exclude_none=True))
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _row_model(row: bench.StatRow) -> StatRowModel:
    return StatRowModel(
        instance=row.instance, algorithm=row.algorithm, best=row.best,
        mean=row.mean, std_dev=row.std_dev, p_value=row.p_value,
        mean_cpu_ms=row.mean_cpu_ms,
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/generate", response_model=GenerateResponse)
def generate(req: GenerateRequest) -> GenerateResponse:
    try:
        spec = GenSpec(**req.spec.model_dump())
        instance = generate_instance(spec)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return GenerateResponse(
        instance=InstanceModel.model_validate(instance_to_dict(instance))
    )


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest) -> SolveResponse:
    if req.algorithm not in ALGORITHM_NAMES:
        raise HTTPException(
            status_code=400,
            detail=f"unknown algorithm {req.algorithm!r}; choose from {ALGORITHM_NAMES}",
        )
    instance = _instance_from_model(req.instance)
    try:
        cfg = req.config.to_config()
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    if req.algorithm == "cha":
        import time

        t0 = time.perf_counter()
        plan = baselines.cha(instance)
        elapsed = (time.perf_counter() - t0) * 1000.0
        return SolveResponse(
            algorithm="cha", seed=cfg.seed, best_profit=plan.profit,
            evaluations=1, plan=PlanModel.model_validate(plan_to_dict(plan)),
            trace=[(1, plan.profit)], qtable=None, elapsed_ms=elapsed,
        )
    if req.algorithm == "rlga":
        result = rlga.run(instance, cfg)
    elif req.algorithm == "rlga_we":
        result = baselines.rlga_we(instance, cfg)
    else:
        result = baselines.classic_ga(instance, cfg)
    return SolveResponse(
        algorithm=result.algorithm,
        seed=result.seed,
        best_profit=result.best_profit,
        evaluations=result.evaluations,
        plan=PlanModel.model_validate(plan_to_dict(result.plan)),
        trace=[(i + 1, int(v)) for i, v in enumerate(result.trace)],
        qtable=None if result.qtable is None else result.qtable.tolist(),
        elapsed_ms=result.elapsed_ms,
    )


@app.post("/validate", response_model=ValidateResponse)
def validate(req: ValidateRequest) -> ValidateResponse:
    instance = _instance_from_model(req.instance)
    try:
        plan = plan_from_dict(req.plan.model_dump())
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    report = validate_plan(instance, plan)
    return ValidateResponse(
        feasible=report.feasible,
        violations=[
            ViolationModel(
                kind=v.kind, message=v.message, task=v.task, sat=v.sat, orbit=v.orbit
            )
            for v in report.violations
        ],
        structural_errors=list(report.structural_errors),
    )


@app.post("/benchmark", response_model=BenchmarkResponse)
def benchmark(req: BenchmarkRequest) -> BenchmarkResponse:
    if req.names is not None and len(req.names) != len(req.instances):
        raise HTTPException(
            status_code=400, detail="names must match instances in length"
        )
    refs: list[Any] = []
    for i, m in enumerate(req.instances):
        name = req.names[i] if req.names is not None else f"instance-{i}"
        refs.append((name, _instance_from_model(m)))
    for m in req.gen_specs:
        try:
            refs.append(GenSpec(**m.model_dump()))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
    try:
        cfg = bench.ExperimentConfig(
            instances=tuple(refs),
            algorithms=tuple(req.algorithms),
            runs=req.runs,
            base_seed=req.base_seed,
            solver=req.config.to_config(),
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    result = bench.run_experiment(cfg)
    traces = None
    if req.include_traces:
        traces = {
            f"{iname}|{algo}": [
                [(int(e), int(p)) for e, p in bench.downsample_trace(t)]
                for t in runs
            ]
            for (iname, algo), runs in result.traces.items()
        }
    return BenchmarkResponse(
        rows=[_row_model(r) for r in result.rows],
        raw=result.raw,
        errors=result.errors,
        traces=traces,
    )


@app.post("/stats", response_model=StatsResponse)
def stats(req: StatsRequest) -> StatsResponse:
    try:
        rows = bench.stats_from_raw(req.raw)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return StatsResponse(rows=[_row_model(r) for r in rows])
