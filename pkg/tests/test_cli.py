import json

import pytest

from gepflex.cli import EXIT_DATA, EXIT_INFEASIBLE, EXIT_OK, EXIT_OTHER, main
from gepflex.io import save_scenario
from gepflex.milp import read_mps
from gepflex.system import ScenarioConfig

from helpers import year_system


@pytest.fixture(scope="module")
def scenario(tmp_path_factory):
    root = tmp_path_factory.mktemp("scen") / "two_zone"
    save_scenario(year_system(), ScenarioConfig(), root)
    return root


@pytest.fixture(scope="module")
def full_run(scenario, tmp_path_factory):
    """One compressed run with results and an MPS file, shared by the checks below."""
    out = tmp_path_factory.mktemp("out")
    code = main(["run", "--scenario", str(scenario), "--compression", "every-other-day",
                 "--emit-mps", str(out / "model.mps"), "--out", str(out / "results")])
    return code, out


def test_run_exit_ok(full_run):
    code, _ = full_run
    assert code == EXIT_OK


def test_results_written(full_run):
    _, out = full_run
    names = sorted(p.name for p in (out / "results").iterdir())
    assert names == sorted([
        "investments.csv", "monthly_energy.csv", "cross_border.csv", "storage_levels.csv",
        "storage_end_of_month.csv", "nodal_prices.csv", "price_summary.csv", "summary.json",
    ])
    doc = json.loads((out / "results" / "summary.json").read_text())
    assert doc["status"] == "optimal" and doc["cost_scale"] == 2.0
    assert doc["scenario"] == "two_zone"


def test_objective_matches_library_solve(full_run, solved_year):
    _, out = full_run
    doc = json.loads((out / "results" / "summary.json").read_text())
    assert doc["objective"] == pytest.approx(solved_year[3].objective, rel=1e-9)


def test_mps_emitted(full_run, solved_year):
    _, out = full_run
    model = read_mps(out / "model.mps")
    assert model.num_vars == solved_year[1].num_vars
    assert len(model.binaries) == len(solved_year[1].binaries)


def test_unreachable_target_is_infeasible(scenario, capsys):
    code = main(["run", "--scenario", str(scenario), "--compression", "every-other-day",
                 "--res-target", "9"])
    assert code == EXIT_INFEASIBLE
    assert "status: infeasible" in capsys.readouterr().out


def test_bad_scenario(tmp_path, capsys):
    (tmp_path / "manifest.yaml").write_text("config: {}\n")
    assert main(["run", "--scenario", str(tmp_path)]) == EXIT_DATA
    assert "buses.csv" in capsys.readouterr().err


def test_invalid_gap(scenario, capsys):
    assert main(["run", "--scenario", str(scenario), "--mip-gap", "-1"]) == EXIT_OTHER
    assert "mip_gap" in capsys.readouterr().err


def test_validate(scenario, capsys):
    assert main(["validate", "--scenario", str(scenario)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("ok: 2 buses, 1 lines")


def test_validate_bad(tmp_path):
    assert main(["validate", "--scenario", str(tmp_path)]) == EXIT_DATA


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2
