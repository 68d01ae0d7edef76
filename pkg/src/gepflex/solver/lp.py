"""LP entry point: dispatches to the built-in simplex or to HiGHS for large models."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ..milp import MilpModel, SolveStatus, Solution, evaluate
from .simplex import simplex

log = logging.getLogger(__name__)

# callables invoked after every LP solve as hook(model, lower, upper, solution)
_SOLVE_HOOKS: list[Callable] = []


def register_solve_hook(hook: Callable) -> Callable:
    """Observe every LP solve (used for auditing and instrumentation)."""
    _SOLVE_HOOKS.append(hook)
    return hook


def unregister_solve_hook(hook: Callable) -> None:
    _SOLVE_HOOKS.remove(hook)


# above this many rows the dense simplex is too slow; HiGHS takes over
AUTO_SIMPLEX_MAX_ROWS = 300


@dataclass(frozen=True)
class SolveOptions:
    feasibility_tol: float = 1e-7
    optimality_tol: float = 1e-7
    integrality_tol: float = 1e-6
    mip_gap: float = 1e-6
    node_limit: int | None = None
    time_limit: float | None = None
    lp_engine: str = "auto"  # auto | simplex | highs

    def __post_init__(self) -> None:
        for name in ("feasibility_tol", "optimality_tol", "integrality_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.mip_gap < 0:
            raise ValueError("mip_gap must be non-negative")
        if self.lp_engine not in ("auto", "simplex", "highs"):
            raise ValueError(f"unknown lp_engine {self.lp_engine!r}")


def _engine(model: MilpModel, options: SolveOptions) -> str:
    if options.lp_engine != "auto":
        return options.lp_engine
    return "simplex" if model.num_constraints <= AUTO_SIMPLEX_MAX_ROWS else "highs"


def solve_lp(
    model: MilpModel,
    options: SolveOptions = SolveOptions(),
    lower: np.ndarray | None = None,
    upper: np.ndarray | None = None,
) -> Solution:
    """Solve the continuous relaxation of ``model``.

    ``lower``/``upper`` override the variable bounds (used by branch and bound).
    Duals follow d(objective)/d(rhs): >= rows get non-negative duals, <= rows
    non-positive ones.
    """
    lo, hi = model.bounds()
    if lower is not None:
        lo = lower
    if upper is not None:
        hi = upper
    c = model.cost_vector()
    if model.num_vars == 0:
        ev = evaluate(model, np.zeros(0))
        if ev.max_violation > options.feasibility_tol:
            return Solution(SolveStatus.INFEASIBLE)
        return Solution(SolveStatus.OPTIMAL, np.zeros(0), model.offset,
                        np.zeros(model.num_constraints))
    if np.any(lo > hi):
        return Solution(SolveStatus.INFEASIBLE)

    engine = _engine(model, options)
    if engine == "simplex":
        sol = _solve_simplex(model, c, lo, hi, options)
    else:
        sol = _solve_highs(model, c, lo, hi, options)
    if sol.status is SolveStatus.OPTIMAL:
        sol.values = np.clip(sol.values, lo, hi)
        check = _violation(model, sol.values, lo, hi)
        if check > 1e-6:
            log.warning("LP %s: %s engine returned violation %.3g", model.name, engine, check)
            sol.status = SolveStatus.NUMERICAL
    for hook in _SOLVE_HOOKS:
        hook(model, lo, hi, sol)
    return sol


def _violation(model: MilpModel, x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    if model.num_constraints == 0:
        act = np.zeros(0)
    else:
        act = model.matrix() @ x
    rl, ru = model.row_bounds()
    parts = [0.0]
    if act.size:
        parts.append(float(np.max(np.maximum(rl - act, act - ru))))
    parts.append(float(np.max(np.maximum(lo - x, x - hi))))
    return max(parts)


def _solve_simplex(model, c, lo, hi, options) -> Solution:
    A = model._cache.get("dense")
    if A is None:
        A = model._cache["dense"] = model.matrix().toarray()
    rl, ru = model.row_bounds()
    res = simplex(c, A, rl, ru, lo, hi, options.feasibility_tol, options.optimality_tol)
    if res.status == "optimal":
        return Solution(SolveStatus.OPTIMAL, res.x, res.objective + model.offset,
                        res.duals, iterations=res.iterations)
    status = {
        "infeasible": SolveStatus.INFEASIBLE,
        "unbounded": SolveStatus.UNBOUNDED,
    }.get(res.status, SolveStatus.NUMERICAL)
    return Solution(status, iterations=res.iterations)


def _solve_highs(model, c, lo, hi, options) -> Solution:
    A = model.matrix()
    senses = np.array([con.sense.value for con in model.constraints])
    rhs = np.array([con.rhs for con in model.constraints])
    le, ge, eq = senses == "<=", senses == ">=", senses == "="
    ub_rows = np.flatnonzero(le | ge)
    sign = np.where(ge[ub_rows], -1.0, 1.0)
    A_ub = A[ub_rows].multiply(sign[:, None]).tocsr() if ub_rows.size else None
    b_ub = rhs[ub_rows] * sign if ub_rows.size else None
    eq_rows = np.flatnonzero(eq)
    A_eq = A[eq_rows] if eq_rows.size else None
    b_eq = rhs[eq_rows] if eq_rows.size else None
    bounds = np.column_stack([
        np.where(np.isfinite(lo), lo, -np.inf),
        np.where(np.isfinite(hi), hi, np.inf),
    ])
    res = linprog(
        c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs",
        options={
            "primal_feasibility_tolerance": options.feasibility_tol,
            "dual_feasibility_tolerance": options.optimality_tol,
            "presolve": True,
        },
    )
    if res.status == 0:
        duals = np.zeros(model.num_constraints)
        if ub_rows.size:
            duals[ub_rows] = res.ineqlin.marginals * sign
        if eq_rows.size:
            duals[eq_rows] = res.eqlin.marginals
        return Solution(SolveStatus.OPTIMAL, np.asarray(res.x, float),
                        float(res.fun) + model.offset, duals, iterations=int(res.nit))
    if res.status == 2:
        return Solution(SolveStatus.INFEASIBLE)
    if res.status == 3:
        return Solution(SolveStatus.UNBOUNDED)
    return Solution(SolveStatus.NUMERICAL)


@dataclass
class DualityCheck:
    primal: float
    dual: float
    gap: float
    complementarity: float


def duality_check(
    model: MilpModel,
    sol: Solution,
    lower: np.ndarray | None = None,
    upper: np.ndarray | None = None,
) -> DualityCheck:
    """Dual objective and complementary slackness computed from returned duals.

    The reduced cost of each column absorbs the variable bounds (``lower`` and
    ``upper`` override the model's, as in a branch-and-bound node). Reduced
    costs within the default optimality tolerance (relative to the column
    magnitude ``|c_j| + sum_i |a_ij y_i|``) are treated as zero, as the solvers
    do; a larger one pushing toward an infinite bound makes the
    dual objective infinite.
    Sign violations of row duals are reported as infinite complementarity.
    """
    x, y = sol.values, sol.duals
    c = model.cost_vector()
    lo, hi = model.bounds()
    if lower is not None:
        lo = np.asarray(lower, float)
    if upper is not None:
        hi = np.asarray(upper, float)
    m = model.num_constraints
    A = model.matrix()
    rhs = np.array([con.rhs for con in model.constraints], dtype=float)
    z = c - (A.T @ y if m else 0.0)
    # reduced costs within the solvers' dual feasibility tolerance count as zero
    scale = np.abs(c) + (abs(A).T @ np.abs(y) if m else 0.0)
    z = np.where(np.abs(z) <= SolveOptions.optimality_tol * np.maximum(1.0, scale), 0.0, z)
    pos, neg = z > 0, z < 0
    with np.errstate(invalid="ignore"):
        if np.any(pos & ~np.isfinite(lo)) or np.any(neg & ~np.isfinite(hi)):
            bound_term, comp = (np.inf if np.any(pos & ~np.isfinite(lo)) else -np.inf), np.inf
        else:
            bound_term = float(np.sum(z[pos] * lo[pos]) + np.sum(z[neg] * hi[neg]))
            comp = float(np.max(np.concatenate([
                np.abs(z[pos] * (x[pos] - lo[pos])),
                np.abs(z[neg] * (hi[neg] - x[neg])),
                [0.0],
            ])))
    dual = float((rhs @ y if m else 0.0) + bound_term + model.offset)
    if m:
        comp = max(comp, float(np.max(np.abs(y * (A @ x - rhs)))))
        senses = np.array([con.sense.value for con in model.constraints])
        if np.any((senses == ">=") & (y < -1e-9)) or np.any((senses == "<=") & (y > 1e-9)):
            comp = np.inf
    return DualityCheck(sol.objective, dual, abs(sol.objective - dual), comp)
