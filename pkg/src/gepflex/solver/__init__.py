"""LP simplex, branch and bound, and the enumeration oracle."""

from .bnb import MAX_ORACLE_BINARIES, enumerate_oracle, solve_milp
from .lp import (
    DualityCheck,
    SolveOptions,
    duality_check,
    register_solve_hook,
    solve_lp,
    unregister_solve_hook,
)

__all__ = [
    "MAX_ORACLE_BINARIES",
    "DualityCheck",
    "SolveOptions",
    "duality_check",
    "enumerate_oracle",
    "solve_lp",
    "register_solve_hook",
    "solve_milp",
    "unregister_solve_hook",
]
