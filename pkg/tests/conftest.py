"""Session-wide LP audit and shared fixtures.

Every optimal LP solved anywhere in the test session is checked for strong
duality and complementary slackness as it happens; the acceptance module
(moved to the end of the run) reports on the collected records.
"""

from __future__ import annotations

from dataclasses import dataclass

import pytest

from gepflex.milp import SolveStatus
from gepflex.solver import duality_check, register_solve_hook


@dataclass
class LpRecord:
    model: str
    rows: int
    cols: int
    primal: float
    gap: float
    complementarity: float

    @property
    def ok(self) -> bool:
        return self.gap <= 1e-6 * (1 + abs(self.primal)) and self.complementarity <= 1e-6


LP_AUDIT: list[LpRecord] = []
ACCEPTANCE_LINES: list[str] = []


@register_solve_hook
def _audit(model, lower, upper, sol):
    if sol.status is not SolveStatus.OPTIMAL:
        return
    chk = duality_check(model, sol, lower, upper)
    LP_AUDIT.append(LpRecord(model.name, model.num_constraints, model.num_vars, chk.primal,
                             chk.gap, chk.complementarity))


def pytest_collection_modifyitems(session, config, items):
    last = [it for it in items if it.path.name == "test_acceptance.py"]
    items[:] = [it for it in items if it.path.name != "test_acceptance.py"] + last


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    if LP_AUDIT:
        bad = sum(not r.ok for r in LP_AUDIT)
        terminalreporter.write_line(
            f"LP duality audit: {len(LP_AUDIT)} optimal LP solves, {bad} outside tolerance")


@pytest.fixture(scope="session")
def solved_year():
    """The two-zone year fixture solved compressed, with pricing."""
    from gepflex.model import assemble
    from gepflex.redispatch import price_dispatch
    from gepflex.solver import solve_milp
    from gepflex.system import ScenarioConfig

    from helpers import year_system

    system = year_system()
    model, registry = assemble(system, ScenarioConfig(compression="every_other_day"))
    sol = solve_milp(model)
    assert sol.status is SolveStatus.OPTIMAL
    pricing = price_dispatch(model, registry, sol)
    return system, model, registry, sol, pricing
