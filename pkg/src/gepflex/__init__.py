"""Generation expansion planning with unit commitment, storage and reserves."""

from .io import DataError, load_scenario, save_scenario
from .milp import MilpModel, ModelError, Solution, SolveStatus, evaluate, read_mps, write_mps
from .model import assemble
from .redispatch import PricingResult, price_dispatch
from .report import ScenarioReport, build_report, save_results
from .solver import SolveOptions, enumerate_oracle, solve_lp, solve_milp
from .system import PowerSystem, ScenarioConfig, validate_system
from .timegrid import TimeGrid, build_time_grid

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "MilpModel",
    "ModelError",
    "PowerSystem",
    "PricingResult",
    "ScenarioConfig",
    "ScenarioReport",
    "Solution",
    "SolveOptions",
    "SolveStatus",
    "TimeGrid",
    "assemble",
    "build_report",
    "build_time_grid",
    "enumerate_oracle",
    "evaluate",
    "load_scenario",
    "price_dispatch",
    "read_mps",
    "save_results",
    "save_scenario",
    "solve_lp",
    "solve_milp",
    "validate_system",
    "write_mps",
]
