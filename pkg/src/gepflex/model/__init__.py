"""Translation of a power system and scenario into a MILP."""

from __future__ import annotations

from ..milp import MilpModel, ModelError
from ..system import CandidateKind, PowerSystem, ScenarioConfig, validate_system
from ..timegrid import TimeGrid, grid_for
from .builders import (
    add_investment_linking,
    add_network,
    add_res,
    add_res_target,
    add_reserve_requirements,
    add_storage,
    add_thermal_uc,
    build_objective,
    target_units,
)
from .registry import RESERVE_ROLES, SYMBOLS, Role, VariableRegistry

__all__ = [
    "RESERVE_ROLES",
    "SYMBOLS",
    "Role",
    "VariableRegistry",
    "add_investment_linking",
    "add_network",
    "add_res",
    "add_res_target",
    "add_reserve_requirements",
    "add_storage",
    "add_thermal_uc",
    "assemble",
    "build_objective",
    "target_units",
]


def assemble(
    system: PowerSystem,
    config: ScenarioConfig,
    grid: TimeGrid | None = None,
    name: str = "gep",
) -> tuple[MilpModel, VariableRegistry]:
    """Build the full model. Units are emitted sorted by id, then hour."""
    report = validate_system(system, config)
    if not report.ok:
        raise ModelError(f"invalid system:\n{report}")
    if grid is None:
        grid = grid_for(config.compression, system.n_hours)
    if grid.physical_hours != system.n_hours:
        raise ModelError(
            f"time grid covers {grid.physical_hours} h but the system has {system.n_hours} h"
        )
    model = MilpModel(name)
    reg = VariableRegistry(system, config, grid)
    if not system.buses:
        return model, reg

    by_id = lambda unit: unit.id  # noqa: E731
    for unit in sorted(system.thermal, key=by_id):
        add_thermal_uc(unit, grid, reg, model)
    for unit in sorted(system.storage, key=by_id):
        add_storage(unit, grid, reg, model)
    for unit in sorted(system.res, key=by_id):
        add_res(unit, grid, reg, model)
    candidates = sorted(system.candidates, key=by_id)
    for cand in candidates:
        if cand.kind is CandidateKind.THERMAL:
            add_thermal_uc(cand.payload, grid, reg, model, candidate=True)
        elif cand.kind is CandidateKind.STORAGE:
            add_storage(cand.payload, grid, reg, model, candidate=cand)
        else:
            add_res(cand.payload, grid, reg, model, candidate=cand)
    add_investment_linking(candidates, grid, reg, model)
    add_network(system, config, grid, reg, model)
    add_reserve_requirements(system, grid, reg, model)
    add_res_target(system, config, grid, reg, model)
    build_objective(system, config, grid, reg, model)
    return model, reg
