"""Command-line client for the scheduling service.

Subcommands map one-to-one onto service endpoints: gen, solve, validate,
bench, stats.  By default handlers run in-process; with --server URL the
same requests go over HTTP.  Output files are deterministic for a fixed
seed: wall-clock timing is printed to stdout but never written to disk.

Exit codes: 0 success, 1 validation failure, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from fastapi import HTTPException

from . import bench, service
from .model import canonical_json

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INPUT = 2


class CliError(Exception):
    """Input error: bad file, bad flag value, or a rejected request."""


class Client:
    """Dispatches requests either in-process or to a remote server."""

    _ROUTES = {
        "/generate": (service.generate, service.GenerateResponse),
        "/solve": (service.solve, service.SolveResponse),
        "/validate": (service.validate, service.ValidateResponse),
        "/benchmark": (service.benchmark, service.BenchmarkResponse),
        "/stats": (service.stats, service.StatsResponse),
    }

    def __init__(self, server: str | None) -> None:
        self.server = server.rstrip("/") if server else None

    def call(self, path: str, request: Any) -> Any:
        handler, response_cls = self._ROUTES[path]
        if self.server is None:
            try:
                return handler(request)
            except HTTPException as exc:
                raise CliError(str(exc.detail)) from exc
        import httpx

        try:
            r = httpx.post(
                self.server + path, json=request.model_dump(), timeout=None
            )
        except httpx.HTTPError as exc:
            raise CliError(f"cannot reach {self.server}: {exc}") from exc
        if r.status_code != 200:
            try:
                detail = r.json().get("detail", r.text)
            except ValueError:
                detail = r.text
            raise CliError(f"server rejected request: {detail}")
        return response_cls.model_validate(r.json())


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}") from exc


def _instance_model(path: str) -> service.InstanceModel:
    doc = _read_json(path)
    try:
        return service.InstanceModel.model_validate(doc)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed (base seed for bench)")
    p.add_argument("--mfe", type=int, default=5000, help="evaluation budget")
    p.add_argument("--np", type=int, default=10, help="population size")
    p.add_argument("--alpha", type=float, default=0.01, help="Q-learning rate")
    p.add_argument("--gamma", type=float, default=0.95, help="Q-learning discount")
    p.add_argument("--temp", type=float, default=1000.0, help="softmax temperature")
    p.add_argument("--eps", type=float, default=0.01, help="exploration probability")
    p.add_argument("--thre", type=int, default=100, help="elite retention threshold")
    p.add_argument("--seg-len", type=int, default=2, help="crossover segment length")


def _solver_options(args: argparse.Namespace, seed: int | None = None) -> service.SolverOptions:
    try:
        return service.SolverOptions(
            np=args.np, mfe=args.mfe, alpha=args.alpha, gamma=args.gamma,
            temp=args.temp, eps=args.eps, thre=args.thre, seg_len=args.seg_len,
            seed=args.seed if seed is None else seed,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edssp",
        description="Detection satellite scheduling: generate, solve, validate, benchmark.",
    )
    parser.add_argument(
        "--server", default=None, metavar="URL",
        help="send requests to a running service instead of in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic instance")
    p.add_argument("--tasks", type=int, required=True, help="number of tasks")
    p.add_argument("--sats", type=int, required=True, help="number of satellites")
    p.add_argument("--horizon", type=int, default=86400, help="horizon seconds")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--windows", type=int, nargs=2, default=(1, 5),
                   metavar=("LO", "HI"), help="windows per task range")
    p.add_argument("--span", type=int, nargs=2, default=(120, 600),
                   metavar=("LO", "HI"), help="window span seconds range")
    p.add_argument("--axis", type=float, default=7000.0, help="semi-major axis km")
    p.add_argument("--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--algo", default="rlga", choices=bench.ALGORITHMS)
    _add_solver_flags(p)
    p.add_argument("--out", default=".", help="directory for plan/trace/result files")

    p = sub.add_parser("validate", help="validate a plan against an instance")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("plan", help="plan JSON file")

    p = sub.add_parser("bench", help="run a benchmark experiment")
    p.add_argument("instances", nargs="*", help="instance JSON files")
    p.add_argument("--gen", action="append", default=[], metavar="TASKS,SATS,SEED",
                   help="generated instance spec; repeatable")
    p.add_argument("--algo", action="append", default=[], choices=bench.ALGORITHMS,
                   help="algorithm to run; repeatable (default rlga, classic_ga, cha)")
    p.add_argument("--runs", type=int, default=30, help="runs per (instance, algorithm)")
    _add_solver_flags(p)
    p.add_argument("--out", default="bench_out", help="output directory")

    p = sub.add_parser("stats", help="recompute statistics from raw results")
    p.add_argument("raw", help="raw_results.json file")
    p.add_argument("--out", default=None, help="output directory (default stdout)")

    return parser


def _cmd_gen(args: argparse.Namespace, client: Client) -> int:
    req = service.GenerateRequest(
        spec=service.GenSpecModel(
            n_tasks=args.tasks, n_sats=args.sats, horizon=args.horizon,
            seed=args.seed, windows_per_task=tuple(args.windows),
            window_span=tuple(args.span), semi_major_axis=args.axis,
        )
    )
    resp = client.call("/generate", req)
    text = canonical_json(resp.instance.model_dump(exclude_none=True))
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_solve(args: argparse.Namespace, client: Client) -> int:
    req = service.SolveRequest(
        instance=_instance_model(args.instance),
        algorithm=args.algo,
        config=_solver_options(args),
    )
    resp = client.call("/solve", req)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "plan.json").write_text(
        canonical_json(resp.plan.model_dump()), encoding="utf-8"
    )
    trace_lines = ["eval,profit"]
    trace_lines.extend(f"{e},{p}" for e, p in resp.trace)
    (out / "trace.csv").write_text("\n".join(trace_lines) + "\n", encoding="utf-8")
    result_doc = {
        "algorithm": resp.algorithm,
        "seed": resp.seed,
        "best_profit": resp.best_profit,
        "evaluations": resp.evaluations,
        "qtable": resp.qtable,
    }
    (out / "result.json").write_text(canonical_json(result_doc), encoding="utf-8")
    print(
        f"{resp.algorithm} seed={resp.seed}: profit {resp.best_profit} "
        f"({len(resp.plan.assignments)} tasks scheduled, "
        f"{resp.evaluations} evaluations, {resp.elapsed_ms:.0f} ms)"
    )
    print(f"wrote {out / 'plan.json'}, {out / 'trace.csv'}, {out / 'result.json'}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace, client: Client) -> int:
    plan_doc = _read_json(args.plan)
    try:
        plan_model = service.PlanModel.model_validate(plan_doc)
    except ValueError as exc:
        raise CliError(f"{args.plan}: {exc}") from exc
    req = service.ValidateRequest(
        instance=_instance_model(args.instance), plan=plan_model
    )
    resp = client.call("/validate", req)
    if resp.feasible:
        print("feasible")
        return EXIT_OK
    for e in resp.structural_errors:
        print(f"[structural] {e}")
    for v in resp.violations:
        print(f"[{v.kind}] {v.message}")
    print(
        f"infeasible: {len(resp.violations)} violation(s), "
        f"{len(resp.structural_errors)} structural error(s)"
    )
    return EXIT_INVALID


def _parse_gen_flag(text: str) -> service.GenSpecModel:
    parts = text.split(",")
    if len(parts) not in (2, 3):
        raise CliError(f"--gen expects TASKS,SATS[,SEED], got {text!r}")
    try:
        n_tasks, n_sats = int(parts[0]), int(parts[1])
        seed = int(parts[2]) if len(parts) == 3 else 0
    except ValueError as exc:
        raise CliError(f"--gen expects integers, got {text!r}") from exc
    return service.GenSpecModel(n_tasks=n_tasks, n_sats=n_sats, seed=seed)


def _cmd_bench(args: argparse.Namespace, client: Client) -> int:
    if not args.instances and not args.gen:
        raise CliError("bench needs instance files or --gen specs")
    algorithms = args.algo or ["rlga", "classic_ga", "cha"]
    req = service.BenchmarkRequest(
        instances=[_instance_model(p) for p in args.instances],
        names=[Path(p).stem for p in args.instances],
        gen_specs=[_parse_gen_flag(g) for g in args.gen],
        algorithms=algorithms,
        runs=args.runs,
        base_seed=args.seed,
        config=_solver_options(args),
        include_traces=True,
    )
    resp = client.call("/benchmark", req)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        bench.StatRow(
            instance=r.instance, algorithm=r.algorithm, best=r.best, mean=r.mean,
            std_dev=r.std_dev, p_value=r.p_value, mean_cpu_ms=r.mean_cpu_ms,
        )
        for r in resp.rows
    ]
    # The written table leaves the timing column empty so reruns with the
    # same flags and seed are byte-identical; timings go to stdout only.
    file_rows = [dataclasses.replace(r, mean_cpu_ms=None) for r in rows]
    (out / "results.csv").write_text(bench.format_rows(file_rows), encoding="utf-8")
    (out / "raw_results.json").write_text(canonical_json(resp.raw), encoding="utf-8")
    trace_dir = out / "traces"
    trace_dir.mkdir(exist_ok=True)
    for key, runs in (resp.traces or {}).items():
        iname, algo = key.split("|", 1)
        for i, pts in enumerate(runs):
            lines = ["eval,profit"]
            lines.extend(f"{e},{p}" for e, p in pts)
            path = trace_dir / f"{iname}_{algo}_seed{args.seed + i}.csv"
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    for iname, msg in resp.errors:
        print(f"error: {iname}: {msg}", file=sys.stderr)
    print(bench.format_rows(rows), end="")
    print(f"wrote {out / 'results.csv'}, {out / 'raw_results.json'}, {trace_dir}/")
    return EXIT_OK


def _cmd_stats(args: argparse.Namespace, client: Client) -> int:
    raw = _read_json(args.raw)
    if not isinstance(raw, dict):
        raise CliError(f"{args.raw}: raw results must be a JSON object")
    resp = client.call("/stats", service.StatsRequest(raw=raw))
    rows = [
        bench.StatRow(
            instance=r.instance, algorithm=r.algorithm, best=r.best, mean=r.mean,
            std_dev=r.std_dev, p_value=r.p_value, mean_cpu_ms=r.mean_cpu_ms,
        )
        for r in resp.rows
    ]
    text = bench.format_rows(rows)
    if args.out is None:
        sys.stdout.write(text)
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "stats.csv").write_text(text, encoding="utf-8")
        print(f"wrote {out / 'stats.csv'}")
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "validate": _cmd_validate,
    "bench": _cmd_bench,
    "stats": _cmd_stats,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    client = Client(args.server)
    try:
        return _COMMANDS[args.command](args, client)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
