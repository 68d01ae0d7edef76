import numpy as np
import pytest

from gepflex.milp import MilpModel, ModelError, Solution, SolveStatus, VarKind, evaluate
from gepflex.model import Role, assemble
from gepflex.redispatch import (
    add_water_incentive,
    extract_prices,
    fix_binaries,
    hydro_level_vars,
    price_dispatch,
)
from gepflex.solver import SolveOptions, duality_check, solve_lp, solve_milp
from gepflex.system import Bus, CandidateUnit, Line, PowerSystem, ScenarioConfig

from helpers import const, one_bus, res, storage, thermal

CFG = ScenarioConfig()


def merit_order(demand, compression="full_year"):
    """Two always-on units: cost 20 up to 60 MW, cost 40 up to 60 MW."""
    n = len(demand)
    kw = dict(n=n, p_min=0.0, startup_cap=60.0, shutdown_cap=60.0, p_max=60.0,
              initial_on=True, ramp_up=60.0, ramp_down=60.0)
    units = [thermal("A", cost_prod=20.0, **kw), thermal("B", cost_prod=40.0, **kw)]
    system = one_bus(demand, thermal=units)
    return assemble(system, ScenarioConfig(compression=compression))


def solve_and_price(model, reg, epsilon=None):
    sol = solve_milp(model)
    assert sol.status is SolveStatus.OPTIMAL
    return sol, price_dispatch(model, reg, sol, epsilon=epsilon)


class TestFixBinaries:
    def test_binary_bounds_pinned(self):
        m = MilpModel()
        y = m.add_variable("y", VarKind.BINARY, 0, 1)
        m.add_variable("x")
        lp = fix_binaries(m, Solution(SolveStatus.OPTIMAL, np.array([1.0, 3.0]), 0.0))
        v = lp.variables[y]
        assert (v.kind, v.lower, v.upper) == (VarKind.CONTINUOUS, 1.0, 1.0)
        assert lp.binaries == []
        # the source model is untouched
        assert m.variables[y].kind is VarKind.BINARY

    def test_no_binaries_unchanged(self):
        m = MilpModel()
        m.add_variable("x", upper=4)
        lp = fix_binaries(m, Solution(SolveStatus.OPTIMAL, np.array([2.0]), 0.0))
        assert lp.variables == m.variables

    def test_fractional_value_rejected(self):
        m = MilpModel()
        m.add_variable("y", VarKind.BINARY, 0, 1)
        with pytest.raises(ModelError, match="fractional"):
            fix_binaries(m, Solution(SolveStatus.OPTIMAL, np.array([0.4]), 0.0))

    def test_missing_values(self):
        with pytest.raises(ModelError):
            fix_binaries(MilpModel(), Solution(SolveStatus.INFEASIBLE))

    def test_fixed_lp_reproduces_milp_objective(self):
        system = one_bus([30, 90, 120, 40], thermal=[thermal(n=4), thermal("G2", n=4,
                                                                           cost_prod=45)])
        m, _ = assemble(system, CFG)
        sol = solve_milp(m)
        lp_sol = solve_lp(fix_binaries(m, sol))
        assert abs(lp_sol.objective - sol.objective) <= 1e-6


class TestWaterIncentive:
    def test_zero_epsilon_unchanged(self):
        m, reg = merit_order([100.0])
        assert add_water_incentive(m, reg, 0.0).objective == m.objective

    def test_negative_epsilon(self):
        m, reg = merit_order([100.0])
        with pytest.raises(ValueError):
            add_water_incentive(m, reg, -1.0)

    def test_tie_broken_toward_fuller_reservoir(self):
        # free PV covers demand; a lossless reservoir may shift 5 MWh either way
        pump = storage("S1", n=2, kind="pump_seasonal", e_initial=5.0, e_max=10.0,
                       eta_ch=1.0, eta_dis=1.0, cost_charge=0.0, p_max_dis=5.0, p_max_ch=5.0)
        system = one_bus([10.0, 10.0], storage=[pump], res=[res(cf=(1.0, 1.0), p_max=20.0)])
        m, reg = assemble(system, CFG)
        sol = solve_lp(add_water_incentive(m, reg, 1e-4))
        levels = sol.values[reg.series("S1", Role.LEVEL)]
        np.testing.assert_allclose(levels, [10.0, 5.0], atol=1e-9)
        # the original objective is the same for every trajectory
        assert evaluate(m, sol.values).objective == pytest.approx(0.0, abs=1e-9)

    def test_only_hydro_levels_rewarded(self):
        bat = storage("BAT", n=1)
        dam = storage("DAM", n=1, kind="dam", p_max_ch=0.0)
        m, reg = assemble(one_bus([1.0], storage=[bat, dam]), CFG)
        assert hydro_level_vars(reg) == reg.series("DAM", Role.LEVEL)


class TestPrices:
    def test_single_bus_marginal_cost(self):
        m, reg = merit_order([100.0])
        _, pr = solve_and_price(m, reg)
        assert pr.nodal_prices["B1"][0] == pytest.approx(40.0, abs=1e-9)

    def test_cheap_unit_marginal(self):
        m, reg = merit_order([50.0])
        _, pr = solve_and_price(m, reg)
        assert pr.nodal_prices["B1"][0] == pytest.approx(20.0, abs=1e-9)

    def test_shedding_hour_priced_at_shed_cost(self):
        m, reg = merit_order([150.0])
        _, pr = solve_and_price(m, reg)
        assert pr.nodal_prices["B1"][0] == pytest.approx(CFG.load_shed_cost, abs=1e-9)

    def test_compressed_prices_divide_out_cost_scale(self):
        m, reg = merit_order([100.0] * 48, compression="every_other_day")
        sol = solve_milp(m)
        lp_sol = solve_lp(fix_binaries(m, sol))
        assert lp_sol.duals[reg.balance_rows[("B1", 0)]] == pytest.approx(80.0, abs=1e-9)
        prices = extract_prices(lp_sol, reg)
        assert prices["B1"][0] == pytest.approx(40.0, abs=1e-9)

    def test_missing_duals(self):
        m, reg = merit_order([100.0])
        with pytest.raises(ModelError, match="duals"):
            extract_prices(Solution(SolveStatus.OPTIMAL, np.zeros(m.num_vars), 0.0), reg)

    def test_price_statistics(self):
        m, reg = merit_order([50.0, 100.0])
        _, pr = solve_and_price(m, reg)
        assert pr.mean_price("B1") == pytest.approx(30.0)
        assert pr.load_weighted_price("B1", [50.0, 100.0]) == pytest.approx(
            (20 * 50 + 40 * 100) / 150)
        assert np.isnan(pr.load_weighted_price("B1", [0.0, 0.0]))


def three_bus(slack, limit=1000.0):
    buses = [Bus(f"N{i}", "CH", (d,)) for i, d in enumerate((20.0, 50.0, 60.0), 1)]
    lines = [Line("L12", "N1", "N2", 10.0, limit), Line("L23", "N2", "N3", 5.0, limit),
             Line("L13", "N1", "N3", 8.0, limit)]
    kw = dict(n=1, p_min=0.0, startup_cap=150.0, shutdown_cap=150.0, p_max=150.0,
              ramp_up=150.0, ramp_down=150.0, initial_on=True)
    units = [thermal("G1", "N1", cost_prod=15.0, **kw), thermal("G3", "N3", cost_prod=35.0, **kw)]
    system = PowerSystem(buses, lines, units, n_hours=1)
    return assemble(system, ScenarioConfig(slack_bus=slack))


class TestNetworkPrices:
    def test_slack_invariance(self):
        prices = []
        for slack in ("N1", "N2", "N3"):
            m, reg = three_bus(slack, limit=40.0)
            _, pr = solve_and_price(m, reg)
            prices.append([pr.nodal_prices[b][0] for b in ("N1", "N2", "N3")])
        np.testing.assert_allclose(prices[1], prices[0], atol=1e-6)
        np.testing.assert_allclose(prices[2], prices[0], atol=1e-6)
        # the limit binds, so prices separate
        assert max(prices[0]) - min(prices[0]) > 1.0

    def test_uncongested_prices_equal(self):
        m, reg = three_bus("N1")
        _, pr = solve_and_price(m, reg)
        vals = [pr.nodal_prices[b][0] for b in ("N1", "N2", "N3")]
        assert max(vals) - min(vals) <= 1e-6
        assert vals[0] == pytest.approx(15.0, abs=1e-9)


class TestPriceDispatch:
    def system(self):
        n = 6
        dam = storage("DAM", n=n, kind="dam", p_max_ch=0.0, p_max_dis=30.0, e_max=60.0,
                      e_initial=30.0, inflow=const(4.0, n), cost_charge=0.0)
        pump = storage("PMP", n=n, kind="pump_daily", e_max=40.0, e_initial=10.0,
                       cost_charge=0.0)
        units = [thermal("G1", n=n, cost_prod=25.0), thermal("G2", n=n, cost_prod=60.0,
                                                             p_min=10.0)]
        system = one_bus([40, 80, 130, 110, 60, 30], thermal=units, storage=[dam, pump],
                         res=[res(cf=(0, 0.2, 0.6, 0.8, 0.3, 0), p_max=40.0)])
        return system

    def test_epsilon_zero_reproduces_milp(self):
        m, reg = assemble(self.system(), CFG)
        sol, pr = solve_and_price(m, reg, epsilon=0.0)
        assert abs(pr.objective_delta) <= 1e-6
        assert abs(pr.lp_objective - sol.objective) <= 1e-6

    def test_epsilon_degradation_bound(self):
        system = self.system()
        m, reg = assemble(system, CFG)
        sol, pr = solve_and_price(m, reg, epsilon=1e-4)
        hydro_cap = sum(s.e_max for s in system.storage if s.kind.is_hydro)
        bound = 1e-4 * hydro_cap * reg.grid.simulated_hours
        assert -1e-6 <= pr.objective_delta <= bound + 1e-9

    def test_dispatch_feasible_and_dual_consistent(self):
        m, reg = assemble(self.system(), CFG)
        sol = solve_milp(m)
        lp = add_water_incentive(fix_binaries(m, sol), reg, 1e-4)
        lp_sol = solve_lp(lp)
        assert evaluate(m, lp_sol.values).max_violation <= 1e-6
        chk = duality_check(lp, lp_sol)
        assert chk.gap <= 1e-6 * (1 + abs(chk.primal)) and chk.complementarity <= 1e-6
        prices = extract_prices(lp_sol, reg)
        assert np.all(np.isfinite(prices["B1"]))

    def test_highs_and_simplex_agree_on_prices(self):
        m, reg = assemble(self.system(), CFG)
        sol = solve_milp(m)
        a = price_dispatch(m, reg, sol, options=SolveOptions(lp_engine="simplex"))
        b = price_dispatch(m, reg, sol, options=SolveOptions(lp_engine="highs"))
        assert a.objective == pytest.approx(b.objective, abs=1e-6)

    def test_candidate_storage_is_rewarded_only_when_hydro(self):
        n = 2
        cand = CandidateUnit("C1", "storage", storage("C1", n=n, kind="pump_daily",
                                                       e_initial=0.0), 5.0)
        m, reg = assemble(one_bus([1.0, 1.0], candidates=[cand]), CFG)
        assert hydro_level_vars(reg) == reg.series("C1", Role.LEVEL)
