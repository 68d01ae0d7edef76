"""Small system factories shared by the tests."""

from __future__ import annotations

import numpy as np

from gepflex.milp import MilpModel, VarKind
from gepflex.system import (
    Bus,
    CandidateUnit,
    Line,
    PowerSystem,
    ReservePolicy,
    ResUnit,
    StorageUnit,
    ThermalUnit,
)


def const(value: float, n: int) -> tuple[float, ...]:
    return (float(value),) * n


def thermal(uid="G1", bus="B1", n=4, **kw) -> ThermalUnit:
    spec = dict(
        p_min=20.0, p_max=100.0, startup_cap=60.0, shutdown_cap=60.0, ramp_up=100.0,
        ramp_down=100.0, min_up=1, min_down=1, cost_prod=30.0, cost_startup=50.0,
        availability=const(1.0, n),
    )
    spec.update(kw)
    return ThermalUnit(uid, bus, **spec)


def storage(uid="S1", bus="B1", n=4, kind="battery", **kw) -> StorageUnit:
    spec = dict(
        p_max_dis=20.0, p_max_ch=20.0, e_min=0.0, e_max=40.0, e_initial=20.0,
        eta_ch=0.9, eta_dis=0.9, inflow=const(0.0, n), cost_charge=0.5,
        tcr_eligible=kind != "battery",
    )
    spec.update(kw)
    return StorageUnit(uid, bus, kind, **spec)


def res(uid="PV1", bus="B1", cf=(0.0, 0.5, 1.0, 0.2), p_max=50.0, tech="pv", cost=0.0) -> ResUnit:
    return ResUnit(uid, bus, p_max, tuple(cf), cost, tech)


def one_bus(demand, **groups) -> PowerSystem:
    n = len(demand)
    return PowerSystem([Bus("B1", "CH", tuple(demand))], n_hours=n, **groups)


def random_mini_system(rng: np.random.Generator, max_binaries: int = 12) -> PowerSystem:
    """Random system within the oracle's reach (at most ``max_binaries`` binaries)."""
    while True:
        n_bus = int(rng.integers(1, 4))
        n_th = int(rng.integers(0, 3))
        n_cand = int(rng.integers(0, 3))
        cand_kinds = [str(rng.choice(["res", "storage", "thermal"])) for _ in range(n_cand)]
        per_hour = 3 * (n_th + cand_kinds.count("thermal"))
        fixed = cand_kinds.count("storage") + cand_kinds.count("thermal")
        t_max = 12 if per_hour == 0 else (max_binaries - fixed) // per_hour
        if t_max >= 1:
            break
    T = int(rng.integers(1, min(t_max, 12) + 1))
    buses = [f"B{i + 1}" for i in range(n_bus)]

    def pick_bus() -> str:
        return buses[int(rng.integers(n_bus))]

    def rnd(lo, hi):
        return float(np.round(rng.uniform(lo, hi), 1))

    demand = {b: tuple(rnd(10, 80) for _ in range(T)) for b in buses}
    zones = ["CH", "DE"]
    bus_objs = [Bus(b, zones[i % 2], demand[b]) for i, b in enumerate(buses)]
    lines = [
        Line(f"L{i}", buses[i - 1], buses[i], rnd(5, 20), rnd(20, 60), bool(i % 2))
        for i in range(1, n_bus)
    ]

    def make_thermal(uid: str, can_start_on: bool = True) -> ThermalUnit:
        p_max = rnd(40, 120)
        p_min = rnd(0, p_max / 3)
        su = rnd(p_min, p_max)
        sd = rnd(p_min, p_max)
        return ThermalUnit(
            uid, pick_bus(), p_min, p_max, su, sd, rnd(20, p_max), rnd(20, p_max),
            int(rng.integers(1, 3)), int(rng.integers(1, 3)), rnd(10, 60), rnd(0, 200),
            const(1.0, T), initial_on=can_start_on and bool(rng.integers(2)),
        )

    th = [make_thermal(f"G{i}") for i in range(n_th)]
    kind = str(rng.choice(["battery", "pump_daily", "pump_seasonal", "dam"]))
    e_max = rnd(20, 60)
    st = [StorageUnit(
        "S0", pick_bus(), kind, rnd(5, 30), 0.0 if kind == "dam" else rnd(5, 30), 0.0, e_max,
        rnd(0, e_max), rnd(0.7, 1.0), rnd(0.7, 1.0),
        tuple(rnd(0, 5) for _ in range(T)) if kind != "battery" else const(0.0, T),
        cost_charge=rnd(0, 2), tcr_eligible=kind != "battery",
    )]
    rs = [ResUnit("R0", pick_bus(), rnd(10, 50), tuple(rnd(0, 1) for _ in range(T)), 0.0,
                  str(rng.choice(["pv", "wind", "run_of_river"])))]
    cands = []
    for i, ck in enumerate(cand_kinds):
        cid = f"C{i}"
        if ck == "res":
            payload = ResUnit(cid, pick_bus(), 0.0, tuple(rnd(0, 1) for _ in range(T)), 0.0,
                              str(rng.choice(["pv", "wind"])))
            cands.append(CandidateUnit(cid, "res", payload, rnd(1, 40), rnd(20, 80), True))
        elif ck == "storage":
            payload = StorageUnit(cid, pick_bus(), "battery", 20.0, 20.0, 0.0, 40.0, 0.0,
                                  0.9, 0.9, const(0.0, T), 0.0, tcr_eligible=False)
            cands.append(CandidateUnit(cid, "storage", payload, rnd(10, 500)))
        else:
            cands.append(CandidateUnit(cid, "thermal", make_thermal(cid, False), rnd(10, 500)))
    pol = ReservePolicy(
        tuple(rnd(0, 10) for _ in range(T)), tuple(rnd(0, 10) for _ in range(T)),
        tuple(rnd(0, 10) for _ in range(T)), tuple(rnd(0, 10) for _ in range(T)),
        a_pv_up=0.01, a_wind_down=0.02,
    )
    return PowerSystem(bus_objs, lines, th, st, rs, cands, pol, n_hours=T)


def random_milp(rng: np.random.Generator, n_bin: int | None = None, n_cont: int | None = None,
                n_rows: int | None = None, feasible: bool = True) -> MilpModel:
    """Bounded random MILP.

    With ``feasible`` every row is satisfied by a hidden random point, so the
    model has at least one feasible assignment; otherwise right-hand sides are
    drawn freely and many instances come out infeasible.
    """
    n_bin = int(rng.integers(0, 13)) if n_bin is None else n_bin
    n_cont = int(rng.integers(1, 41)) if n_cont is None else n_cont
    n_rows = int(rng.integers(1, 16)) if n_rows is None else n_rows
    m = MilpModel("rand")
    point = []
    for j in range(n_bin):
        m.add_variable(f"y{j}", VarKind.BINARY, 0.0, 1.0)
        m.add_objective_term(j, float(rng.integers(-10, 20)))
        point.append(float(rng.integers(2)))
    for j in range(n_cont):
        ub = float(rng.integers(1, 20))
        m.add_variable(f"x{j}", VarKind.CONTINUOUS, 0.0, ub)
        m.add_objective_term(n_bin + j, float(rng.integers(-5, 10)))
        point.append(float(rng.integers(0, int(ub) + 1)))
    n = n_bin + n_cont
    for i in range(n_rows):
        k = int(rng.integers(1, min(n, 6) + 1))
        idx = rng.choice(n, size=k, replace=False)
        terms = [(int(j), float(rng.integers(-5, 6)) or 1.0) for j in sorted(idx)]
        sense = str(rng.choice(["<=", ">=", "="], p=[0.5, 0.35, 0.15]))
        if feasible:
            act = sum(c * point[j] for j, c in terms)
            slack = 0.0 if sense == "=" else float(rng.integers(0, 4))
            rhs = act + slack if sense == "<=" else act - slack
        else:
            rhs = float(rng.integers(-5, 30))
        m.add_constraint(f"r{i}", terms, sense, rhs)
    return m


def pv_profile(n: int = 8760, seasonal: bool = True) -> tuple[float, ...]:
    """Half-sine daylight profile, optionally with a summer peak."""
    h = np.arange(n)
    hod = h % 24
    cf = np.where((hod >= 6) & (hod <= 18), np.sin(np.pi * (hod - 6) / 12), 0.0)
    if seasonal:
        day = h // 24
        cf = cf * (0.75 + 0.25 * np.cos(2 * np.pi * (day - 172) / 365))
    return tuple(np.round(cf, 6))


def year_system(n: int = 8760, res_target_flag: bool = True) -> PowerSystem:
    """Two-zone system over a year.

    The nuclear unit is the cheapest dispatchable resource and net demand
    always exceeds its capacity plus every zero-cost renewable, so it runs at
    full output and the LP relaxation is already integral in its binaries.
    Biomass (cost 60) is the marginal resource.
    """
    cf = pv_profile(n)
    cf_arr = np.array(cf)
    buses = [
        Bus("CH1", "CH", tuple(500.0 + 100.0 * cf_arr), const(-20.0, n)),
        Bus("DE1", "DE", const(150.0, n)),
    ]
    lines = [Line("L1", "CH1", "DE1", 10.0, 300.0, True)]
    nuc = ThermalUnit("NUC", "CH1", 100.0, 250.0, 250.0, 250.0, 250.0, 250.0, 1, 1, 8.0,
                      1000.0, const(1.0, n), initial_on=True, technology="nuclear")
    dam = StorageUnit("DAM", "CH1", "dam", 50.0, 0.0, 0.0, 5000.0, 2500.0, 1.0, 1.0,
                      const(20.0, n))
    bat = StorageUnit("BAT", "DE1", "battery", 20.0, 20.0, 0.0, 80.0, 40.0, 0.9, 0.9,
                      const(0.0, n), cost_charge=0.5, tcr_eligible=False)
    rs = [
        ResUnit("PV1", "CH1", 100.0, cf, 0.0, "pv"),
        ResUnit("ROR", "CH1", 20.0, const(0.8, n), 0.0, "run_of_river"),
        ResUnit("BIO", "DE1", 600.0, const(1.0, n), 60.0, "biomass"),
    ]
    cands = [
        CandidateUnit("PVC", "res", ResUnit("PVC", "CH1", 0.0, cf, 0.0, "pv"),
                      80000.0, 150.0, res_target_flag),
        CandidateUnit("BATC", "storage",
                      StorageUnit("BATC", "DE1", "battery", 30.0, 30.0, 0.0, 120.0, 60.0,
                                  0.92, 0.92, const(0.0, n), cost_charge=0.5,
                                  tcr_eligible=False), 2.0e6),
    ]
    pol = ReservePolicy(const(10.0, n), const(10.0, n), const(20.0, n), const(10.0, n),
                        a_pv_up=26 / 3254, a_pv_down=28 / 3254)
    return PowerSystem(buses, lines, [nuc], [dam, bat], rs, cands, pol, n_hours=n)


def day_periodic_system(n: int = 8760) -> PowerSystem:
    """One bus, no binaries, every day identical: PV, biomass, a daily pump and a battery."""
    hod = np.arange(n) % 24
    demand = tuple(300.0 + 100.0 * np.sin(np.pi * hod / 24))
    rs = [
        ResUnit("PV1", "B1", 150.0, pv_profile(n, seasonal=False), 0.0, "pv"),
        ResUnit("BIO", "B1", 500.0, const(1.0, n), 60.0, "biomass"),
    ]
    st = [
        StorageUnit("PMP", "B1", "pump_daily", 50.0, 50.0, 0.0, 300.0, 150.0, 0.85, 0.9,
                    const(0.0, n), cost_charge=0.5),
        StorageUnit("BAT", "B1", "battery", 20.0, 20.0, 0.0, 80.0, 40.0, 0.9, 0.9,
                    const(0.0, n), cost_charge=0.5, tcr_eligible=False),
    ]
    return PowerSystem([Bus("B1", "CH", demand)], res=rs, storage=st, n_hours=n)
