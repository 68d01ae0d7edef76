"""Power system and scenario data.

All records are frozen; hourly series are stored as tuples of floats so that
two systems compare equal field by field. The time step is one hour, so MW and
MWh interconvert with factor 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields
from typing import Iterator, Sequence

HOURS_PER_YEAR = 8760


def _series(values: Sequence[float]) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


def _freeze(obj, *names: str) -> None:
    for name in names:
        object.__setattr__(obj, name, _series(getattr(obj, name)))


class StorageKind(str, enum.Enum):
    BATTERY = "battery"
    PUMP_DAILY = "pump_daily"
    PUMP_SEASONAL = "pump_seasonal"
    DAM = "dam"

    @property
    def is_hydro(self) -> bool:
        return self is not StorageKind.BATTERY


class ResTech(str, enum.Enum):
    PV = "pv"
    WIND = "wind"
    RUN_OF_RIVER = "run_of_river"
    BIOMASS = "biomass"


class CandidateKind(str, enum.Enum):
    THERMAL = "thermal"
    STORAGE = "storage"
    RES = "res"


class Compression(str, enum.Enum):
    FULL_YEAR = "full_year"
    EVERY_OTHER_DAY = "every_other_day"


class StorageCostSide(str, enum.Enum):
    CHARGE = "charge"
    DISCHARGE = "discharge"


@dataclass(frozen=True)
class Bus:
    id: str
    zone: str
    demand: tuple[float, ...]
    fixed_injection: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.fixed_injection:
            object.__setattr__(self, "fixed_injection", (0.0,) * len(self.demand))
        _freeze(self, "demand", "fixed_injection")


@dataclass(frozen=True)
class Line:
    id: str
    from_bus: str
    to_bus: str
    susceptance: float
    limit: float
    is_tie_line: bool = False


@dataclass(frozen=True)
class ThermalUnit:
    id: str
    bus: str
    p_min: float
    p_max: float
    startup_cap: float
    shutdown_cap: float
    ramp_up: float
    ramp_down: float
    min_up: int
    min_down: int
    cost_prod: float
    cost_startup: float
    availability: tuple[float, ...]
    scr_eligible: bool = True
    tcr_eligible: bool = True
    initial_on: bool = False
    technology: str = "thermal"

    def __post_init__(self) -> None:
        _freeze(self, "availability")


@dataclass(frozen=True)
class StorageUnit:
    id: str
    bus: str
    kind: StorageKind
    p_max_dis: float
    p_max_ch: float
    e_min: float
    e_max: float
    e_initial: float
    eta_ch: float
    eta_dis: float
    inflow: tuple[float, ...]
    cost_charge: float = 0.0
    scr_eligible: bool = True
    tcr_eligible: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", StorageKind(self.kind))
        _freeze(self, "inflow")


@dataclass(frozen=True)
class ResUnit:
    id: str
    bus: str
    p_max: float
    capacity_factor: tuple[float, ...]
    cost_prod: float
    technology: ResTech

    def __post_init__(self) -> None:
        object.__setattr__(self, "technology", ResTech(self.technology))
        _freeze(self, "capacity_factor")

    @property
    def counts_toward_res_target(self) -> bool:
        # existing non-hydro renewables count toward the annual target
        return self.technology is not ResTech.RUN_OF_RIVER


@dataclass(frozen=True)
class CandidateUnit:
    id: str
    kind: CandidateKind
    payload: ThermalUnit | StorageUnit | ResUnit
    invest_cost: float
    invest_cap_max: float = 0.0
    counts_toward_res_target: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", CandidateKind(self.kind))

    @property
    def bus(self) -> str:
        return self.payload.bus


@dataclass(frozen=True)
class ReservePolicy:
    scr_up: tuple[float, ...]
    scr_down: tuple[float, ...]
    tcr_up: tuple[float, ...]
    tcr_down: tuple[float, ...]
    a_wind_up: float = 0.0
    a_wind_down: float = 0.0
    a_pv_up: float = 0.0
    a_pv_down: float = 0.0

    def __post_init__(self) -> None:
        _freeze(self, "scr_up", "scr_down", "tcr_up", "tcr_down")

    @classmethod
    def zero(cls, n_hours: int) -> "ReservePolicy":
        z = (0.0,) * n_hours
        return cls(z, z, z, z)


@dataclass(frozen=True)
class ScenarioConfig:
    load_shed_cost: float = 3000.0
    res_target_energy: float | None = None
    water_incentive: float = 1e-4
    slack_bus: str | None = None
    compression: Compression = Compression.FULL_YEAR
    base_mva: float = 100.0
    storage_cost_side: StorageCostSide = StorageCostSide.CHARGE

    def __post_init__(self) -> None:
        object.__setattr__(self, "compression", Compression(self.compression))
        object.__setattr__(self, "storage_cost_side", StorageCostSide(self.storage_cost_side))


@dataclass(frozen=True)
class PowerSystem:
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...] = ()
    thermal: tuple[ThermalUnit, ...] = ()
    storage: tuple[StorageUnit, ...] = ()
    res: tuple[ResUnit, ...] = ()
    candidates: tuple[CandidateUnit, ...] = ()
    reserves: ReservePolicy | None = None
    n_hours: int = HOURS_PER_YEAR

    def __post_init__(self) -> None:
        for name in ("buses", "lines", "thermal", "storage", "res", "candidates"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.reserves is None:
            object.__setattr__(self, "reserves", ReservePolicy.zero(self.n_hours))

    def bus(self, bus_id: str) -> Bus:
        for b in self.buses:
            if b.id == bus_id:
                return b
        raise KeyError(bus_id)

    def candidates_of(self, kind: CandidateKind) -> list[CandidateUnit]:
        return [c for c in self.candidates if c.kind is kind]

    def unit_ids(self) -> Iterator[str]:
        for group in (self.thermal, self.storage, self.res, self.candidates):
            for unit in group:
                yield unit.id


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    def add(self, where: str, message: str) -> None:
        self.violations.append(f"{where}: {message}")

    def __len__(self) -> int:
        return len(self.violations)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        return "\n".join(self.violations) if self.violations else "ok"


def _check_len(report: ValidationReport, where: str, name: str, series, n: int) -> None:
    if len(series) != n:
        report.add(where, f"{name} has {len(series)} entries, expected {n}")


def _check_bounded(report, where, name, series, lo=0.0, hi=math.inf) -> None:
    for t, v in enumerate(series):
        if not math.isfinite(v) or v < lo or v > hi:
            report.add(where, f"{name}[{t}]={v} outside [{lo}, {hi}]")
            return


def validate_system(system: PowerSystem, config: ScenarioConfig) -> ValidationReport:
    """Collect every invariant violation; never raises."""
    rep = ValidationReport()
    n = system.n_hours
    bus_ids = [b.id for b in system.buses]
    known = set(bus_ids)
    if len(known) != len(bus_ids):
        rep.add("buses", "duplicate bus id")
    for b in system.buses:
        where = f"bus {b.id}"
        _check_len(rep, where, "demand", b.demand, n)
        _check_len(rep, where, "fixed_injection", b.fixed_injection, n)
        _check_bounded(rep, where, "demand", b.demand)

    line_ids = set()
    for line in system.lines:
        where = f"line {line.id}"
        if line.id in line_ids:
            rep.add(where, "duplicate line id")
        line_ids.add(line.id)
        if not line.limit > 0:
            rep.add(where, "limit must be positive")
        if not line.susceptance > 0:
            rep.add(where, "susceptance must be positive")
        if line.from_bus == line.to_bus:
            rep.add(where, "from_bus equals to_bus")
        for end in (line.from_bus, line.to_bus):
            if end not in known:
                rep.add(where, f"unknown bus {end!r}")

    seen_units: set[str] = set()

    def unit_header(unit, where):
        if unit.id in seen_units:
            rep.add(where, "duplicate unit id")
        seen_units.add(unit.id)
        if unit.bus not in known:
            rep.add(where, f"unknown bus {unit.bus!r}")

    def check_thermal(u: ThermalUnit, where: str) -> None:
        if not 0 <= u.p_min <= u.startup_cap <= u.p_max:
            rep.add(where, "requires 0 <= p_min <= startup_cap <= p_max")
        if not u.p_min <= u.shutdown_cap <= u.p_max:
            rep.add(where, "requires p_min <= shutdown_cap <= p_max")
        if u.min_up < 1 or u.min_down < 1:
            rep.add(where, "min_up and min_down must be >= 1")
        if not (u.ramp_up > 0 and u.ramp_down > 0):
            rep.add(where, "ramp rates must be positive")
        _check_len(rep, where, "availability", u.availability, n)
        for t, s in enumerate(u.availability):
            if s not in (0.0, 1.0):
                rep.add(where, f"availability[{t}]={s} is not 0/1")
                break
        if config.load_shed_cost <= u.cost_prod:
            rep.add(where, "production cost must be below the load-shedding cost")

    def check_storage(s: StorageUnit, where: str) -> None:
        if not (0 < s.eta_ch <= 1 and 0 < s.eta_dis <= 1):
            rep.add(where, "efficiencies must lie in (0, 1]")
        if not s.e_min <= s.e_initial <= s.e_max:
            rep.add(where, "requires e_min <= e_initial <= e_max")
        if s.p_max_dis < 0 or s.p_max_ch < 0:
            rep.add(where, "power ratings must be non-negative")
        if s.kind is StorageKind.DAM and s.p_max_ch != 0:
            rep.add(where, "dam must have p_max_ch = 0")
        if s.kind is StorageKind.BATTERY and s.tcr_eligible:
            rep.add(where, "battery TCR must be zero")
        _check_len(rep, where, "inflow", s.inflow, n)
        if s.kind is StorageKind.BATTERY and any(v != 0 for v in s.inflow):
            rep.add(where, "battery inflow must be zero")
        if config.load_shed_cost <= s.cost_charge:
            rep.add(where, "production cost must be below the load-shedding cost")

    def check_res(r: ResUnit, where: str) -> None:
        if r.p_max < 0:
            rep.add(where, "p_max must be non-negative")
        _check_len(rep, where, "capacity_factor", r.capacity_factor, n)
        for t, v in enumerate(r.capacity_factor):
            if not 0.0 <= v <= 1.0:
                rep.add(where, f"capacity factor {v} at hour {t} outside [0, 1]")
                break
        if config.load_shed_cost <= r.cost_prod:
            rep.add(where, "production cost must be below the load-shedding cost")

    for u in system.thermal:
        where = f"thermal {u.id}"
        unit_header(u, where)
        check_thermal(u, where)
    for s in system.storage:
        where = f"storage {s.id}"
        unit_header(s, where)
        check_storage(s, where)
    for r in system.res:
        where = f"res {r.id}"
        unit_header(r, where)
        check_res(r, where)
    for c in system.candidates:
        where = f"candidate {c.id}"
        if c.payload.id != c.id:
            rep.add(where, f"payload id {c.payload.id!r} differs from candidate id")
        unit_header(c, where)
        expected = {
            CandidateKind.THERMAL: ThermalUnit,
            CandidateKind.STORAGE: StorageUnit,
            CandidateKind.RES: ResUnit,
        }[c.kind]
        if not isinstance(c.payload, expected):
            rep.add(where, f"{c.kind.value} candidate needs a {expected.__name__} payload")
            continue
        if c.invest_cost < 0:
            rep.add(where, "investment cost must be non-negative")
        if c.kind is CandidateKind.RES:
            if not c.invest_cap_max > 0:
                rep.add(where, "RES candidate needs invest_cap_max > 0")
            check_res(c.payload, where)
        elif c.kind is CandidateKind.THERMAL:
            check_thermal(c.payload, where)
            if c.payload.initial_on:
                rep.add(where, "candidate thermal unit cannot start online")
        else:
            check_storage(c.payload, where)

    pol = system.reserves
    for name in ("scr_up", "scr_down", "tcr_up", "tcr_down"):
        series = getattr(pol, name)
        _check_len(rep, "reserves", name, series, n)
        _check_bounded(rep, "reserves", name, series)
    for name in ("a_wind_up", "a_wind_down", "a_pv_up", "a_pv_down"):
        if getattr(pol, name) < 0:
            rep.add("reserves", f"{name} must be non-negative")

    if config.slack_bus is not None and config.slack_bus not in known:
        rep.add("config", f"slack bus {config.slack_bus!r} does not exist")
    if config.water_incentive < 0:
        rep.add("config", "water_incentive must be non-negative")
    costs = [u.cost_prod for u in system.thermal] + [s.cost_charge for s in system.storage]
    costs += [r.cost_prod for r in system.res]
    for c in system.candidates:
        p = c.payload
        costs.append(getattr(p, "cost_prod", getattr(p, "cost_charge", 0.0)))
    nonzero = [abs(v) for v in costs if v != 0]
    if nonzero and config.water_incentive > 1e-3 * min(nonzero):
        rep.add("config", "water_incentive must be at least 1000x below every nonzero production cost")
    if config.res_target_energy is not None and config.res_target_energy < 0:
        rep.add("config", "res_target_energy must be non-negative")
    return rep


def field_names(cls) -> list[str]:
    return [f.name for f in fields(cls)]
