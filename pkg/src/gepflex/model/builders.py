"""Constraint families of the co-optimized investment and operation model."""

from __future__ import annotations

from collections import deque

import numpy as np

from ..milp import INF, MilpModel, ModelError, VarKind
from ..system import (
    CandidateKind,
    CandidateUnit,
    PowerSystem,
    ResTech,
    ResUnit,
    ScenarioConfig,
    StorageCostSide,
    StorageKind,
    StorageUnit,
    ThermalUnit,
)
from ..timegrid import TimeGrid, compress_series, storage_scaling
from .registry import RESERVE_ROLES, Role, VariableRegistry


def _c(grid: TimeGrid, series) -> np.ndarray:
    return compress_series(grid, series)


def _reserve_vars(model, registry, unit_id, t, scr: bool, tcr: bool, tcr_upper=INF):
    if scr:
        registry.add(model, unit_id, t, Role.SCR_UP)
        registry.add(model, unit_id, t, Role.SCR_DOWN)
    if tcr:
        registry.add(model, unit_id, t, Role.TCR_UP, upper=tcr_upper)
        registry.add(model, unit_id, t, Role.TCR_DOWN, upper=tcr_upper)


def _reserve_terms(registry, unit_id, t, roles, sign=1.0):
    terms = []
    for role in roles:
        vid = registry.get(unit_id, t, role)
        if vid is not None:
            terms.append((vid, sign))
    return terms


# ---------------------------------------------------------------------------
# thermal units
# ---------------------------------------------------------------------------

def add_thermal_uc(
    unit: ThermalUnit,
    grid: TimeGrid,
    registry: VariableRegistry,
    model: MilpModel,
    candidate: bool = False,
) -> None:
    """Tight/compact commitment rows for one unit.

    Output is ``p = P^min u + p^min``; ``p`` itself is never a column.
    Ramping limits the above-minimum output. Minimum up/down windows are
    truncated at the horizon start (no inherited obligations).
    """
    T = grid.simulated_hours
    uid = unit.id
    span = unit.p_max - unit.p_min
    avail = _c(grid, unit.availability)
    u0 = 0.0 if candidate else float(unit.initial_on)

    for t in range(T):
        registry.add(model, uid, t, Role.ON, VarKind.BINARY, 0.0, 1.0)
        registry.add(model, uid, t, Role.START, VarKind.BINARY, 0.0, 1.0)
        registry.add(model, uid, t, Role.STOP, VarKind.BINARY, 0.0, 1.0)
        registry.add(model, uid, t, Role.ABOVE_MIN, upper=span)
        _reserve_vars(model, registry, uid, t, unit.scr_eligible, unit.tcr_eligible)

    u = registry.series(uid, Role.ON)
    v = registry.series(uid, Role.START)
    w = registry.series(uid, Role.STOP)
    pm = registry.series(uid, Role.ABOVE_MIN)
    down = (Role.SCR_DOWN, Role.TCR_DOWN)
    up = (Role.SCR_UP, Role.TCR_UP)
    maintenance = bool(np.any(avail < 1.0))

    for t in range(T):
        key = f"{uid},{t}"
        model.add_constraint(
            f"th_down[{key}]", [(pm[t], 1.0)] + _reserve_terms(registry, uid, t, down, -1.0),
            ">=", 0.0,
        )
        head = [(pm[t], 1.0)] + _reserve_terms(registry, uid, t, up) + [(u[t], -span)]
        su = unit.p_max - unit.startup_cap
        sd = unit.p_max - unit.shutdown_cap
        has_next = t + 1 < T
        if unit.min_up <= 1:
            model.add_constraint(f"th_up_su[{key}]", head + [(v[t], su)], "<=", 0.0)
            model.add_constraint(
                f"th_up_sd[{key}]", head + ([(w[t + 1], sd)] if has_next else []), "<=", 0.0
            )
        else:
            model.add_constraint(
                f"th_up[{key}]",
                head + [(v[t], su)] + ([(w[t + 1], sd)] if has_next else []),
                "<=", 0.0,
            )
        # u_{t-1} - u_t + v_t - w_t = 0
        logic = [(u[t], -1.0), (v[t], 1.0), (w[t], -1.0)]
        if t > 0:
            model.add_constraint(f"th_logic[{key}]", [(u[t - 1], 1.0)] + logic, "=", 0.0)
        else:
            model.add_constraint(f"th_logic[{key}]", logic, "=", -u0)
        if maintenance:
            model.add_constraint(f"th_maint[{key}]", [(u[t], 1.0)], "<=", float(avail[t]))
        if t > 0:
            model.add_constraint(
                f"th_ramp_up[{key}]", [(pm[t], 1.0), (pm[t - 1], -1.0)], "<=", unit.ramp_up
            )
            model.add_constraint(
                f"th_ramp_down[{key}]", [(pm[t - 1], 1.0), (pm[t], -1.0)], "<=", unit.ramp_down
            )
        first = max(0, t - unit.min_up + 1)
        model.add_constraint(
            f"th_min_up[{key}]", [(v[i], 1.0) for i in range(first, t + 1)] + [(u[t], -1.0)],
            "<=", 0.0,
        )
        first = max(0, t - unit.min_down + 1)
        model.add_constraint(
            f"th_min_down[{key}]", [(w[i], 1.0) for i in range(first, t + 1)] + [(u[t], 1.0)],
            "<=", 1.0,
        )


# ---------------------------------------------------------------------------
# storage units
# ---------------------------------------------------------------------------

def add_storage(
    unit: StorageUnit,
    grid: TimeGrid,
    registry: VariableRegistry,
    model: MilpModel,
    candidate: CandidateUnit | None = None,
) -> None:
    """Power bounds, level bounds with a periodic end state, level dynamics and
    reserve capability of one storage.

    For a candidate, every capacity constant is multiplied by the investment
    variable; those rows are emitted by :func:`add_investment_linking`, so here
    the power and level columns are only bounded by the physical ratings.
    """
    T = grid.simulated_hours
    sid = unit.id
    sc = storage_scaling(grid, unit)
    dam = unit.kind is StorageKind.DAM
    battery = unit.kind is StorageKind.BATTERY
    e_lo = max(0.0, sc.bound_scale * unit.e_min)
    e_hi = sc.bound_scale * unit.e_max
    e0 = sc.bound_scale * unit.e_initial
    inflow = _c(grid, unit.inflow) * sc.inflow_coeff
    inv = registry.invest(model, candidate) if candidate is not None else None

    for t in range(T):
        registry.add(model, sid, t, Role.DIS, upper=unit.p_max_dis)
        registry.add(model, sid, t, Role.CH, upper=0.0 if dam else unit.p_max_ch)
        if inv is None:
            registry.add(model, sid, t, Role.LEVEL, lower=e_lo, upper=e_hi)
        else:
            registry.add(model, sid, t, Role.LEVEL, lower=0.0, upper=e_hi)
        _reserve_vars(
            model, registry, sid, t, unit.scr_eligible, unit.tcr_eligible,
            tcr_upper=0.0 if battery else INF,
        )

    dis = registry.series(sid, Role.DIS)
    ch = registry.series(sid, Role.CH)
    lev = registry.series(sid, Role.LEVEL)
    k_ch = sc.charge_coeff * unit.eta_ch
    k_dis = sc.discharge_coeff / unit.eta_dis
    up = (Role.SCR_UP, Role.TCR_UP)
    down = (Role.SCR_DOWN, Role.TCR_DOWN)

    for t in range(T):
        key = f"{sid},{t}"
        # e_t - e_{t-1} - k_ch ch_t + k_dis dis_t = inflow_t
        terms = [(lev[t], 1.0), (ch[t], -k_ch), (dis[t], k_dis)]
        rhs = float(inflow[t])
        if t > 0:
            terms.append((lev[t - 1], -1.0))
        elif inv is None:
            rhs += e0
        else:
            terms.append((inv, -e0))
        if inv is not None and inflow[t] != 0.0:
            # an unbuilt reservoir receives no inflow
            terms.append((inv, -float(inflow[t])))
            rhs -= float(inflow[t])
        model.add_constraint(f"st_dyn[{key}]", terms, "=", rhs)

        cap_dis = [] if inv is None else [(inv, -unit.p_max_dis)]
        rhs_dis = unit.p_max_dis if inv is None else 0.0
        model.add_constraint(
            f"st_res_up[{key}]",
            _reserve_terms(registry, sid, t, up) + [(dis[t], 1.0), (ch[t], -1.0)] + cap_dis,
            "<=", rhs_dis,
        )
        if not dam:
            cap_ch = [] if inv is None else [(inv, -unit.p_max_ch)]
            model.add_constraint(
                f"st_res_down[{key}]",
                _reserve_terms(registry, sid, t, down) + [(ch[t], 1.0), (dis[t], -1.0)] + cap_ch,
                "<=", unit.p_max_ch if inv is None else 0.0,
            )
        else:
            dam_terms = [(dis[t], 1.0)] + _reserve_terms(registry, sid, t, down, -1.0)
            model.add_constraint(f"st_dam_lo[{key}]", dam_terms, ">=", 0.0)
            model.add_constraint(f"st_dam_hi[{key}]", dam_terms + cap_dis, "<=", rhs_dis)

    if T:
        last = f"st_terminal[{sid}]"
        if inv is None:
            model.add_constraint(last, [(lev[T - 1], 1.0)], "=", e0)
        else:
            model.add_constraint(last, [(lev[T - 1], 1.0), (inv, -e0)], "=", 0.0)


# ---------------------------------------------------------------------------
# renewables
# ---------------------------------------------------------------------------

def add_res(
    unit: ResUnit,
    grid: TimeGrid,
    registry: VariableRegistry,
    model: MilpModel,
    candidate: CandidateUnit | None = None,
) -> None:
    """Production column per hour; curtailment is the gap to the available output."""
    cf = _c(grid, unit.capacity_factor)
    for t in range(grid.simulated_hours):
        if candidate is None:
            registry.add(model, unit.id, t, Role.RES_PROD, upper=float(cf[t] * unit.p_max))
        else:
            registry.add(model, unit.id, t, Role.RES_PROD)


# ---------------------------------------------------------------------------
# investments
# ---------------------------------------------------------------------------

def add_investment_linking(
    candidates,
    grid: TimeGrid,
    registry: VariableRegistry,
    model: MilpModel,
) -> None:
    """Tie each candidate's operation to its build decision."""
    T = grid.simulated_hours
    system = registry.system
    existing = {u.id for group in (system.thermal, system.storage, system.res) for u in group}
    for cand in candidates:
        if cand.id in existing:
            raise ModelError(f"candidate id {cand.id!r} collides with an existing unit")
        inv = registry.invest(model, cand)
        unit = cand.payload
        if cand.kind is CandidateKind.THERMAL:
            for t in range(T):
                model.add_constraint(
                    f"inv_on[{cand.id},{t}]",
                    [(registry[(cand.id, t, Role.ON)], 1.0), (inv, -1.0)], "<=", 0.0,
                )
        elif cand.kind is CandidateKind.STORAGE:
            sc = storage_scaling(grid, unit)
            for t in range(T):
                key = f"{cand.id},{t}"
                model.add_constraint(
                    f"inv_dis[{key}]",
                    [(registry[(cand.id, t, Role.DIS)], 1.0), (inv, -unit.p_max_dis)], "<=", 0.0,
                )
                model.add_constraint(
                    f"inv_ch[{key}]",
                    [(registry[(cand.id, t, Role.CH)], 1.0), (inv, -unit.p_max_ch)], "<=", 0.0,
                )
                lev = registry[(cand.id, t, Role.LEVEL)]
                model.add_constraint(
                    f"inv_level_max[{key}]", [(lev, 1.0), (inv, -sc.bound_scale * unit.e_max)],
                    "<=", 0.0,
                )
                if unit.e_min > 0:
                    model.add_constraint(
                        f"inv_level_min[{key}]",
                        [(lev, 1.0), (inv, -sc.bound_scale * unit.e_min)], ">=", 0.0,
                    )
        else:
            cf = _c(grid, unit.capacity_factor)
            for t in range(T):
                model.add_constraint(
                    f"inv_res[{cand.id},{t}]",
                    [(registry[(cand.id, t, Role.RES_PROD)], 1.0), (inv, -float(cf[t]))],
                    "<=", 0.0,
                )


# ---------------------------------------------------------------------------
# reserve requirements
# ---------------------------------------------------------------------------

def _providers(system: PowerSystem):
    thermal = [u.id for u in system.thermal]
    thermal += [c.id for c in system.candidates if c.kind is CandidateKind.THERMAL]
    storage = list(system.storage)
    storage += [c.payload for c in system.candidates if c.kind is CandidateKind.STORAGE]
    return thermal, storage


def add_reserve_requirements(
    system: PowerSystem,
    grid: TimeGrid,
    registry: VariableRegistry,
    model: MilpModel,
) -> None:
    """System-wide SCR/TCR requirement rows.

    TCR providers are thermal units and hydro storages; the TCR requirement
    grows with built wind and PV capacity. SCR has no renewable adder.
    """
    pol = system.reserves
    thermal, storage = _providers(system)
    hydro = [s.id for s in storage if s.kind.is_hydro]
    all_storage = [s.id for s in storage]
    invest_res = [c for c in system.candidates if c.kind is CandidateKind.RES]
    wind = [registry.invest(model, c) for c in invest_res if c.payload.technology is ResTech.WIND]
    pv = [registry.invest(model, c) for c in invest_res if c.payload.technology is ResTech.PV]
    req = {
        Role.SCR_UP: (_c(grid, pol.scr_up), 0.0, 0.0),
        Role.SCR_DOWN: (_c(grid, pol.scr_down), 0.0, 0.0),
        Role.TCR_UP: (_c(grid, pol.tcr_up), pol.a_wind_up, pol.a_pv_up),
        Role.TCR_DOWN: (_c(grid, pol.tcr_down), pol.a_wind_down, pol.a_pv_down),
    }
    for t in range(grid.simulated_hours):
        for role in RESERVE_ROLES:
            series, a_wind, a_pv = req[role]
            units = thermal + (hydro if role in (Role.TCR_UP, Role.TCR_DOWN) else all_storage)
            terms = [(registry.vars[(uid, t, role)], 1.0) for uid in units
                     if (uid, t, role) in registry.vars]
            if a_wind:
                terms += [(vid, -a_wind) for vid in wind]
            if a_pv:
                terms += [(vid, -a_pv) for vid in pv]
            cid = model.add_constraint(f"req_{role.value}[{t}]", terms, ">=", float(series[t]))
            registry.reserve_rows[(role.value, t)] = cid


# ---------------------------------------------------------------------------
# network
# ---------------------------------------------------------------------------

def _slack_bus(system: PowerSystem, config: ScenarioConfig) -> str:
    if config.slack_bus is not None:
        return config.slack_bus
    return system.buses[0].id


def _check_connected(system: PowerSystem, slack: str) -> None:
    adj: dict[str, list[str]] = {b.id: [] for b in system.buses}
    for line in system.lines:
        adj[line.from_bus].append(line.to_bus)
        adj[line.to_bus].append(line.from_bus)
    seen = {slack}
    queue = deque([slack])
    while queue:
        for nxt in adj[queue.popleft()]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    orphans = [b.id for b in system.buses if b.id not in seen]
    if orphans:
        raise ModelError(f"buses {orphans} are not connected to slack bus {slack!r}")


def add_network(
    system: PowerSystem,
    config: ScenarioConfig,
    grid: TimeGrid,
    registry: VariableRegistry,
    model: MilpModel,
) -> None:
    """Nodal balance, DC flow definition, line limits and load shedding."""
    if not system.buses:
        return
    slack = _slack_bus(system, config)
    _check_connected(system, slack)
    registry.slack_bus = slack
    T = grid.simulated_hours
    demand = {b.id: _c(grid, b.demand) for b in system.buses}
    fixed = {b.id: _c(grid, b.fixed_injection) for b in system.buses}

    for b in system.buses:
        for t in range(T):
            registry.add(model, b.id, t, Role.LOAD_SHED, upper=float(demand[b.id][t]))
            if b.id == slack:
                registry.add(model, b.id, t, Role.ANGLE, lower=0.0, upper=0.0)
            else:
                registry.add(model, b.id, t, Role.ANGLE, lower=-INF, upper=INF)
    for line in system.lines:
        for t in range(T):
            registry.add(model, line.id, t, Role.FLOW, lower=-line.limit, upper=line.limit)

    # injections at each bus: (unit id, role, coefficient); thermal output is
    # P^min u + p^min
    inject: dict[str, list] = {b.id: [] for b in system.buses}
    for u in system.thermal:
        inject[u.bus] += [(u.id, Role.ON, u.p_min), (u.id, Role.ABOVE_MIN, 1.0)]
    for s in system.storage:
        inject[s.bus] += [(s.id, Role.DIS, 1.0), (s.id, Role.CH, -1.0)]
    for r in system.res:
        inject[r.bus].append((r.id, Role.RES_PROD, 1.0))
    for c in system.candidates:
        if c.kind is CandidateKind.THERMAL:
            inject[c.bus] += [(c.id, Role.ON, c.payload.p_min), (c.id, Role.ABOVE_MIN, 1.0)]
        elif c.kind is CandidateKind.STORAGE:
            inject[c.bus] += [(c.id, Role.DIS, 1.0), (c.id, Role.CH, -1.0)]
        else:
            inject[c.bus].append((c.id, Role.RES_PROD, 1.0))

    for b in system.buses:
        for t in range(T):
            terms: dict[int, float] = {}
            for uid, role, coef in inject[b.id]:
                vid = registry.vars[(uid, t, role)]
                terms[vid] = terms.get(vid, 0.0) + coef
            terms[registry.vars[(b.id, t, Role.LOAD_SHED)]] = 1.0
            for line in system.lines:
                if line.to_bus == b.id:
                    terms[registry.vars[(line.id, t, Role.FLOW)]] = 1.0
                elif line.from_bus == b.id:
                    terms[registry.vars[(line.id, t, Role.FLOW)]] = -1.0
            rhs = float(demand[b.id][t] - fixed[b.id][t])
            cid = model.add_constraint(f"balance[{b.id},{t}]", list(terms.items()), "=", rhs)
            registry.balance_rows[(b.id, t)] = cid

    for line in system.lines:
        k = config.base_mva * line.susceptance
        for t in range(T):
            model.add_constraint(
                f"flow_def[{line.id},{t}]",
                [
                    (registry.vars[(line.id, t, Role.FLOW)], 1.0),
                    (registry.vars[(line.from_bus, t, Role.ANGLE)], -k),
                    (registry.vars[(line.to_bus, t, Role.ANGLE)], k),
                ],
                "=", 0.0,
            )


# ---------------------------------------------------------------------------
# renewable energy target
# ---------------------------------------------------------------------------

def target_units(system: PowerSystem) -> list[tuple[str, str]]:
    """(unit id, unit class) pairs whose production counts toward the target."""
    out = [(u.id, "thermal") for u in system.thermal if u.technology == "biomass"]
    out += [(r.id, "res") for r in system.res if r.counts_toward_res_target]
    for c in system.candidates:
        if c.counts_toward_res_target and c.kind is not CandidateKind.STORAGE:
            out.append((c.id, c.kind.value))
    return out


def add_res_target(
    system: PowerSystem,
    config: ScenarioConfig,
    grid: TimeGrid,
    registry: VariableRegistry,
    model: MilpModel,
) -> None:
    """Annual non-hydro renewable energy, scaled back to a full year, >= target."""
    if config.res_target_energy is None:
        return
    k = grid.cost_scale
    pmin = {u.id: u.p_min for u in system.thermal}
    pmin.update({c.id: c.payload.p_min for c in system.candidates
                 if c.kind is CandidateKind.THERMAL})
    terms = []
    for uid, cls in target_units(system):
        for t in range(grid.simulated_hours):
            if cls == "thermal":
                terms.append((registry.vars[(uid, t, Role.ON)], k * pmin[uid]))
                terms.append((registry.vars[(uid, t, Role.ABOVE_MIN)], k))
            else:
                terms.append((registry.vars[(uid, t, Role.RES_PROD)], k))
    model.add_constraint("res_target", terms, ">=", float(config.res_target_energy))


# ---------------------------------------------------------------------------
# objective
# ---------------------------------------------------------------------------

def build_objective(
    system: PowerSystem,
    config: ScenarioConfig,
    grid: TimeGrid,
    registry: VariableRegistry,
    model: MilpModel,
) -> None:
    """Operating costs scaled by ``grid.cost_scale``; investment costs are annual."""
    k = grid.cost_scale
    T = grid.simulated_hours
    add = model.add_objective_term
    charge_side = config.storage_cost_side is StorageCostSide.CHARGE

    def thermal(u: ThermalUnit):
        for t in range(T):
            add(registry.vars[(u.id, t, Role.ON)], k * u.cost_prod * u.p_min)
            add(registry.vars[(u.id, t, Role.ABOVE_MIN)], k * u.cost_prod)
            add(registry.vars[(u.id, t, Role.START)], k * u.cost_startup)

    def storage(s: StorageUnit):
        role = Role.CH if charge_side else Role.DIS
        for t in range(T):
            add(registry.vars[(s.id, t, role)], k * s.cost_charge)

    def res(r: ResUnit):
        for t in range(T):
            add(registry.vars[(r.id, t, Role.RES_PROD)], k * r.cost_prod)

    for u in sorted(system.thermal, key=lambda x: x.id):
        thermal(u)
    for s in sorted(system.storage, key=lambda x: x.id):
        storage(s)
    for r in sorted(system.res, key=lambda x: x.id):
        res(r)
    for c in sorted(system.candidates, key=lambda x: x.id):
        {CandidateKind.THERMAL: thermal, CandidateKind.STORAGE: storage,
         CandidateKind.RES: res}[c.kind](c.payload)
        add(registry.invest(model, c), c.invest_cost)
    for b in system.buses:
        for t in range(T):
            add(registry.vars[(b.id, t, Role.LOAD_SHED)], k * config.load_shed_cost)
