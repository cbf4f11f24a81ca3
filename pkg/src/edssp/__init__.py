"""Detection satellite scheduling: solvers, instance generator, benchmark harness."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Assignment,
    Instance,
    Orbit,
    Plan,
    Satellite,
    Task,
    TimeWindow,
    ValidationReport,
    Violation,
    load_instance,
    load_plan,
    plan_profit,
    save_instance,
    save_plan,
    validate_plan,
)
from .decoder import Decoder, decode  # noqa: F401
from .instgen import GenSpec, generate_instance, orbit_period  # noqa: F401
from .rlga import Individual, QTable, RunResult, SolverConfig, run  # noqa: F401
from .baselines import cha, classic_ga, rlga_we  # noqa: F401
from .bench import ExperimentConfig, StatRow, rank_sum_test, run_experiment  # noqa: F401
