"""Result views: investments, monthly energy, storage levels, prices, exchanges."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .io import csv_text, write_json, _write
from .model import Role, VariableRegistry
from .model.builders import _c
from .redispatch import PricingResult
from .system import CandidateKind, PowerSystem, StorageKind
from .timegrid import TimeGrid, storage_scaling

MONTHS = range(1, 13)


@dataclass
class Dispatch:
    """Decoded variable values keyed by (unit, role)."""

    registry: VariableRegistry
    values: np.ndarray

    @property
    def grid(self) -> TimeGrid:
        return self.registry.grid

    def series(self, unit: str, role: Role) -> np.ndarray:
        T = self.grid.simulated_hours
        out = np.zeros(T)
        for t in range(T):
            vid = self.registry.get(unit, t, role)
            if vid is not None:
                out[t] = self.values[vid]
        return out

    def invest(self, unit: str) -> float:
        vid = self.registry.get(unit, None, Role.INVEST)
        return 0.0 if vid is None else float(self.values[vid])

    def thermal_output(self, unit_id: str, p_min: float) -> np.ndarray:
        return p_min * self.series(unit_id, Role.ON) + self.series(unit_id, Role.ABOVE_MIN)


def storage_class(kind: StorageKind) -> str:
    return {
        StorageKind.DAM: "hydro_dam",
        StorageKind.PUMP_DAILY: "pumped_hydro",
        StorageKind.PUMP_SEASONAL: "pumped_hydro",
        StorageKind.BATTERY: "battery",
    }[kind]


def _all_units(system: PowerSystem):
    thermal = list(system.thermal)
    storage = list(system.storage)
    res = list(system.res)
    for c in system.candidates:
        {CandidateKind.THERMAL: thermal, CandidateKind.STORAGE: storage,
         CandidateKind.RES: res}[c.kind].append(c.payload)
    return thermal, storage, res


def _month_index(grid: TimeGrid) -> np.ndarray:
    days = np.array([grid.month_of(d * grid.hours_per_day) for d in range(grid.simulated_days)])
    return np.repeat(days, grid.hours_per_day)


def aggregate_monthly(dispatch: Dispatch, system: PowerSystem, grid: TimeGrid) -> dict:
    """Energy per (zone, month, class) in MWh of the physical year.

    Production classes come from the unit technology; ``pumping``, ``demand``,
    ``load_shed`` and ``net_imports`` (inter-zone line flows plus fixed
    injections) complete each zone's balance.
    """
    zone = {b.id: b.zone for b in system.buses}
    month = _month_index(grid)
    k = grid.cost_scale
    out: dict[tuple[str, int, str], float] = defaultdict(float)

    def add(z: str, tech: str, hourly: np.ndarray) -> None:
        sums = np.bincount(month, weights=hourly, minlength=13)
        for m in MONTHS:
            out[(z, m, tech)] += k * sums[m]

    thermal, storage, res = _all_units(system)
    for u in thermal:
        add(zone[u.bus], u.technology, dispatch.thermal_output(u.id, u.p_min))
    for s in storage:
        add(zone[s.bus], storage_class(s.kind), dispatch.series(s.id, Role.DIS))
        add(zone[s.bus], "pumping", dispatch.series(s.id, Role.CH))
    for r in res:
        add(zone[r.bus], r.technology.value, dispatch.series(r.id, Role.RES_PROD))
    for b in system.buses:
        add(b.zone, "demand", _c(grid, b.demand))
        add(b.zone, "load_shed", dispatch.series(b.id, Role.LOAD_SHED))
        add(b.zone, "net_imports", _c(grid, b.fixed_injection))
    for line in system.lines:
        zf, zt = zone[line.from_bus], zone[line.to_bus]
        if zf != zt:
            flow = dispatch.series(line.id, Role.FLOW)
            add(zt, "net_imports", flow)
            add(zf, "net_imports", -flow)
    return dict(out)


def cross_border(dispatch: Dispatch, system: PowerSystem, grid: TimeGrid) -> dict:
    """Net energy per (border, month); positive means flow from the first zone
    of the alphabetically ordered pair to the second."""
    zone = {b.id: b.zone for b in system.buses}
    month = _month_index(grid)
    out: dict[tuple[str, int], float] = defaultdict(float)
    for line in system.lines:
        zf, zt = zone[line.from_bus], zone[line.to_bus]
        if zf == zt:
            continue
        a, b = sorted((zf, zt))
        sign = 1.0 if zf == a else -1.0
        sums = np.bincount(month, weights=dispatch.series(line.id, Role.FLOW), minlength=13)
        for m in MONTHS:
            out[(f"{a}-{b}", m)] += sign * grid.cost_scale * sums[m]
    return dict(out)


def storage_trajectory(dispatch: Dispatch, grid: TimeGrid, units=None) -> dict[str, list[float]]:
    """End-of-month level per storage, with daily-pump doubling divided out."""
    if units is None:
        _, units, _ = _all_units(dispatch.registry.system)
    month = _month_index(grid)
    out = {}
    for s in units:
        scale = storage_scaling(grid, s).bound_scale
        levels = dispatch.series(s.id, Role.LEVEL) / scale
        row = []
        last = float("nan")
        for m in MONTHS:
            idx = np.flatnonzero(month == m)
            if idx.size:
                last = float(levels[idx[-1]])
            row.append(last)
        out[s.id] = row
    return out


@dataclass
class ScenarioReport:
    name: str
    status: str
    objective: float
    investment_cost: float
    investments: list[dict] = field(default_factory=list)
    monthly_energy: dict = field(default_factory=dict)
    storage_levels: dict[str, np.ndarray] = field(default_factory=dict)
    end_of_month: dict[str, list[float]] = field(default_factory=dict)
    exchange: dict = field(default_factory=dict)
    prices: dict[str, np.ndarray] = field(default_factory=dict)
    price_stats: list[dict] = field(default_factory=list)
    grid: TimeGrid | None = None
    extra: dict = field(default_factory=dict)


def build_report(
    name: str,
    registry: VariableRegistry,
    status: str,
    objective: float,
    values: np.ndarray | None,
    pricing: PricingResult | None = None,
) -> ScenarioReport:
    system, grid = registry.system, registry.grid
    rep = ScenarioReport(name, status, objective, 0.0, grid=grid)
    if values is None:
        return rep
    dispatch = Dispatch(registry, pricing.dispatch if pricing is not None else values)
    built = Dispatch(registry, values)
    for c in sorted(system.candidates, key=lambda c: c.id):
        q = built.invest(c.id)
        rep.investments.append({
            "id": c.id, "kind": c.kind.value, "bus": c.bus,
            "technology": getattr(c.payload, "technology", getattr(c.payload, "kind", "")),
            "built": q, "cost": q * c.invest_cost,
        })
        rep.investment_cost += q * c.invest_cost
    rep.monthly_energy = aggregate_monthly(dispatch, system, grid)
    rep.exchange = cross_border(dispatch, system, grid)
    _, storage, _ = _all_units(system)
    for s in sorted(storage, key=lambda s: s.id):
        rep.storage_levels[s.id] = dispatch.series(s.id, Role.LEVEL) / storage_scaling(grid, s).bound_scale
    rep.end_of_month = storage_trajectory(dispatch, grid, sorted(storage, key=lambda s: s.id))
    if pricing is not None:
        rep.prices = pricing.nodal_prices
        for b in system.buses:
            d = _c(grid, b.demand)
            rep.price_stats.append({
                "bus": b.id, "zone": b.zone,
                "mean": pricing.mean_price(b.id),
                "load_weighted": pricing.load_weighted_price(b.id, d),
            })
        rep.extra["pricing_objective_delta"] = pricing.objective_delta
    return rep


def _f(x: float) -> str:
    """Fixed precision keeps result files byte-stable across runs."""
    if x != x:
        return "nan"
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def save_results(report: ScenarioReport, directory: str | Path) -> None:
    root = Path(directory)
    grid = report.grid
    _write(root / "investments.csv", csv_text(
        ["candidate", "kind", "bus", "technology", "built", "cost"],
        [[r["id"], r["kind"], r["bus"], str(getattr(r["technology"], "value", r["technology"])),
          _f(r["built"]), _f(r["cost"])] for r in report.investments],
    ))
    _write(root / "monthly_energy.csv", csv_text(
        ["zone", "month", "technology", "energy_mwh"],
        [[z, m, tech, _f(v)] for (z, m, tech), v in sorted(report.monthly_energy.items())],
    ))
    _write(root / "cross_border.csv", csv_text(
        ["border", "month", "net_mwh"],
        [[b, m, _f(v)] for (b, m), v in sorted(report.exchange.items())],
    ))
    rows = []
    for sid, levels in report.storage_levels.items():
        for t, v in enumerate(levels):
            rows.append([sid, t, grid.physical_hour(t), _f(v)])
    _write(root / "storage_levels.csv",
           csv_text(["storage", "hour", "physical_hour", "level_mwh"], rows))
    _write(root / "storage_end_of_month.csv", csv_text(
        ["storage", "month", "level_mwh"],
        [[sid, m, _f(v)] for sid, row in report.end_of_month.items()
         for m, v in zip(MONTHS, row)],
    ))
    rows = []
    for bus, series in report.prices.items():
        for t, v in enumerate(series):
            rows.append([bus, t, grid.physical_hour(t), _f(v)])
    _write(root / "nodal_prices.csv", csv_text(["bus", "hour", "physical_hour", "price"], rows))
    _write(root / "price_summary.csv", csv_text(
        ["bus", "zone", "mean_price", "load_weighted_price"],
        [[r["bus"], r["zone"], _f(r["mean"]), _f(r["load_weighted"])] for r in report.price_stats],
    ))
    write_json(root / "summary.json", {
        "scenario": report.name,
        "status": report.status,
        "objective": round(report.objective, 6) if report.objective == report.objective else None,
        "investment_cost": round(report.investment_cost, 6),
        "simulated_hours": grid.simulated_hours if grid else 0,
        "cost_scale": grid.cost_scale if grid else 1.0,
        **{k: round(v, 6) for k, v in report.extra.items()},
    })
