"""Pricing run: fix the integer decisions, re-solve the dispatch LP, read prices.

With all binaries pinned to the MILP incumbent the model is a plain LP whose
balance-row duals are nodal prices. A tiny reward on hydro reservoir levels
picks one trajectory among equally cheap ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .milp import MilpModel, ModelError, SolveStatus, Solution, VarKind, Variable, evaluate
from .model import Role, VariableRegistry
from .solver import SolveOptions, solve_lp
from .system import CandidateKind


@dataclass
class PricingResult:
    nodal_prices: dict[str, np.ndarray]  # bus -> price per simulated hour, currency/MWh
    dispatch: np.ndarray
    objective: float  # original objective evaluated at the pricing dispatch
    objective_delta: float  # objective - MILP objective
    lp_objective: float  # objective of the pricing LP, incentive included

    def mean_price(self, bus: str) -> float:
        return float(np.mean(self.nodal_prices[bus]))

    def load_weighted_price(self, bus: str, demand) -> float:
        d = np.asarray(demand, float)
        if d.sum() == 0:
            return float("nan")
        return float(np.dot(self.nodal_prices[bus], d) / d.sum())


def fix_binaries(
    model: MilpModel, solution: Solution, options: SolveOptions = SolveOptions()
) -> MilpModel:
    """Copy of ``model`` with every binary turned into a fixed continuous column."""
    if solution.values is None:
        raise ModelError("solution carries no values")
    lp = model.copy()
    for vid in model.binaries:
        val = float(solution.values[vid])
        r = round(val)
        if abs(val - r) > options.integrality_tol:
            raise ModelError(
                f"binary {model.variables[vid].name!r} has fractional value {val}"
            )
        lp.variables[vid] = Variable(model.variables[vid].name, VarKind.CONTINUOUS, float(r), float(r))
    return lp


def hydro_level_vars(registry: VariableRegistry) -> list[int]:
    system = registry.system
    units = [s for s in system.storage if s.kind.is_hydro]
    units += [c.payload for c in system.candidates
              if c.kind is CandidateKind.STORAGE and c.payload.kind.is_hydro]
    out = []
    for s in sorted(units, key=lambda u: u.id):
        out += registry.series(s.id, Role.LEVEL)
    return out


def add_water_incentive(lp: MilpModel, registry: VariableRegistry, epsilon: float) -> MilpModel:
    """Reward every hourly hydro level by ``epsilon`` per MWh."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    out = lp.copy()
    if epsilon == 0:
        return out
    for vid in hydro_level_vars(registry):
        out.add_objective_term(vid, -epsilon)
    return out


def extract_prices(solution: Solution, registry: VariableRegistry) -> dict[str, np.ndarray]:
    """Balance-row duals divided by the cost scale (currency per physical MWh)."""
    if solution.duals is None:
        raise ModelError("solution has no duals; prices need a pure LP solve")
    T = registry.grid.simulated_hours
    prices = {}
    for b in registry.system.buses:
        rows = [registry.balance_rows[(b.id, t)] for t in range(T)]
        prices[b.id] = solution.duals[rows] / registry.grid.cost_scale
    return prices


def price_dispatch(
    model: MilpModel,
    registry: VariableRegistry,
    milp_solution: Solution,
    epsilon: float | None = None,
    options: SolveOptions = SolveOptions(),
) -> PricingResult:
    if epsilon is None:
        epsilon = registry.config.water_incentive
    lp = add_water_incentive(fix_binaries(model, milp_solution, options), registry, epsilon)
    sol = solve_lp(lp, options)
    if sol.status is not SolveStatus.OPTIMAL:
        raise ModelError(f"pricing LP ended with status {sol.status.value}")
    original = evaluate(model, sol.values).objective
    return PricingResult(
        nodal_prices=extract_prices(sol, registry),
        dispatch=sol.values,
        objective=original,
        objective_delta=original - milp_solution.objective,
        lp_objective=sol.objective,
    )
