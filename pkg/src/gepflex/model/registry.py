"""Mapping from (unit, hour, role) to decision-variable ids."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..milp import INF, MilpModel, VarKind
from ..system import CandidateKind, CandidateUnit, PowerSystem, ScenarioConfig
from ..timegrid import TimeGrid


class Role(str, enum.Enum):
    ON = "on"
    START = "start"
    STOP = "stop"
    ABOVE_MIN = "above_min"
    DIS = "dis"
    CH = "ch"
    LEVEL = "level"
    SCR_UP = "scr_up"
    SCR_DOWN = "scr_down"
    TCR_UP = "tcr_up"
    TCR_DOWN = "tcr_down"
    RES_PROD = "res_prod"
    LOAD_SHED = "load_shed"
    ANGLE = "angle"
    FLOW = "flow"
    INVEST = "invest"


RESERVE_ROLES = (Role.SCR_UP, Role.SCR_DOWN, Role.TCR_UP, Role.TCR_DOWN)

# Every symbol of the formulation and where it lives: a data field ("param") or
# a decision-variable role ("var"). Total production p_j is substituted away.
SYMBOLS: dict[str, tuple[str, str]] = {
    # thermal
    "u_{j,t}": ("var", Role.ON.value),
    "v_{j,t}": ("var", Role.START.value),
    "w_{j,t}": ("var", Role.STOP.value),
    "p^min_{j,t}": ("var", Role.ABOVE_MIN.value),
    "r^SCR_up": ("var", Role.SCR_UP.value),
    "r^SCR_down": ("var", Role.SCR_DOWN.value),
    "r^TCR_up": ("var", Role.TCR_UP.value),
    "r^TCR_down": ("var", Role.TCR_DOWN.value),
    "P^min_j": ("param", "ThermalUnit.p_min"),
    "P^max_j": ("param", "ThermalUnit.p_max"),
    "SU_j": ("param", "ThermalUnit.startup_cap"),
    "SD_j": ("param", "ThermalUnit.shutdown_cap"),
    "M^ut_j": ("param", "ThermalUnit.min_up"),
    "M^dt_j": ("param", "ThermalUnit.min_down"),
    "RU_j": ("param", "ThermalUnit.ramp_up"),
    "RD_j": ("param", "ThermalUnit.ramp_down"),
    "C^prod_j": ("param", "ThermalUnit.cost_prod"),
    "C^su_j": ("param", "ThermalUnit.cost_startup"),
    "S_{j,t}": ("param", "ThermalUnit.availability"),
    # storage
    "p^dis_{s,t}": ("var", Role.DIS.value),
    "p^ch_{s,t}": ("var", Role.CH.value),
    "e_{s,t}": ("var", Role.LEVEL.value),
    "P^max,dis_s": ("param", "StorageUnit.p_max_dis"),
    "P^max,ch_s": ("param", "StorageUnit.p_max_ch"),
    "E^min_s": ("param", "StorageUnit.e_min"),
    "E^max_s": ("param", "StorageUnit.e_max"),
    "E_{s,0}": ("param", "StorageUnit.e_initial"),
    "eta^ch_s": ("param", "StorageUnit.eta_ch"),
    "eta^dis_s": ("param", "StorageUnit.eta_dis"),
    "xi_{s,t}": ("param", "StorageUnit.inflow"),
    "C^prod_s": ("param", "StorageUnit.cost_charge"),
    # renewables
    "p_{r,t}": ("var", Role.RES_PROD.value),
    "P^max_r": ("param", "ResUnit.p_max"),
    "CF_{r,t}": ("param", "ResUnit.capacity_factor"),
    "C^prod_r": ("param", "ResUnit.cost_prod"),
    # investment
    "u^inv_c": ("var", Role.INVEST.value),
    "I_c": ("param", "CandidateUnit.invest_cost"),
    "P^inv,max_c": ("param", "CandidateUnit.invest_cap_max"),
    # reserves
    "TCR^up,sys_t": ("param", "ReservePolicy.tcr_up"),
    "TCR^down,sys_t": ("param", "ReservePolicy.tcr_down"),
    "SCR^up,sys_t": ("param", "ReservePolicy.scr_up"),
    "SCR^down,sys_t": ("param", "ReservePolicy.scr_down"),
    "A^up_wind": ("param", "ReservePolicy.a_wind_up"),
    "A^down_wind": ("param", "ReservePolicy.a_wind_down"),
    "A^up_pv": ("param", "ReservePolicy.a_pv_up"),
    "A^down_pv": ("param", "ReservePolicy.a_pv_down"),
    # network
    "P^D_{n,t}": ("param", "Bus.demand"),
    "ls_{n,t}": ("var", Role.LOAD_SHED.value),
    "delta_{n,t}": ("var", Role.ANGLE.value),
    "p_{l,t}": ("var", Role.FLOW.value),
    "B_l": ("param", "Line.susceptance"),
    "P^max_l": ("param", "Line.limit"),
    "C^ls": ("param", "ScenarioConfig.load_shed_cost"),
}


Key = tuple[str, "int | None", Role]


@dataclass
class VariableRegistry:
    system: PowerSystem
    config: ScenarioConfig
    grid: TimeGrid
    vars: dict[Key, int] = field(default_factory=dict)
    balance_rows: dict[tuple[str, int], int] = field(default_factory=dict)
    reserve_rows: dict[tuple[str, int], int] = field(default_factory=dict)
    slack_bus: str | None = None

    def add(
        self,
        model: MilpModel,
        unit: str,
        t: int | None,
        role: Role,
        kind: VarKind = VarKind.CONTINUOUS,
        lower: float = 0.0,
        upper: float = INF,
    ) -> int:
        key = (unit, t, role)
        if key in self.vars:
            raise KeyError(f"variable {key} registered twice")
        name = f"{role.value}[{unit}]" if t is None else f"{role.value}[{unit},{t}]"
        vid = model.add_variable(name, kind, lower, upper)
        self.vars[key] = vid
        return vid

    def get(self, unit: str, t: int | None, role: Role) -> int | None:
        return self.vars.get((unit, t, role))

    def __getitem__(self, key: Key) -> int:
        return self.vars[key]

    def has(self, unit: str, role: Role, t: int | None = 0) -> bool:
        return (unit, t, role) in self.vars

    def invest(self, model: MilpModel, cand: CandidateUnit) -> int:
        """Investment variable of a candidate, created on first use."""
        vid = self.get(cand.id, None, Role.INVEST)
        if vid is not None:
            return vid
        if cand.kind is CandidateKind.RES:
            return self.add(model, cand.id, None, Role.INVEST, VarKind.CONTINUOUS, 0.0,
                            cand.invest_cap_max)
        return self.add(model, cand.id, None, Role.INVEST, VarKind.BINARY, 0.0, 1.0)

    def series(self, unit: str, role: Role) -> list[int]:
        return [self.vars[(unit, t, role)] for t in range(self.grid.simulated_hours)]
