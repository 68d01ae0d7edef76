"""Scenario directories: a YAML manifest, CSV unit tables and hourly series.

Layout::

    manifest.yaml            config + reserve coefficients
    buses.csv                id, zone
    lines.csv                id, from_bus, to_bus, susceptance, limit, is_tie_line
    thermal_units.csv        existing and candidate thermal records
    storage_units.csv        existing and candidate storage records
    res_units.csv            existing and candidate renewable records
    candidates.csv           id, kind, invest_cost, invest_cap_max, counts_toward_res_target
    series/demand.csv        hour + one column per bus (required)
    series/fixed_injection.csv, series/availability.csv, series/inflow.csv,
    series/capacity_factor.csv, series/reserves.csv

A unit listed in ``candidates.csv`` takes its payload from the unit table with
the same id. Series files hold one column per id and exactly 8760 rows.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import fields
from pathlib import Path
from typing import Any

import yaml

from .system import (
    HOURS_PER_YEAR,
    Bus,
    CandidateKind,
    CandidateUnit,
    Line,
    PowerSystem,
    ReservePolicy,
    ResUnit,
    ScenarioConfig,
    StorageUnit,
    ThermalUnit,
    validate_system,
)

MANIFEST = "manifest.yaml"

BUS_COLS = ["id", "zone"]
LINE_COLS = ["id", "from_bus", "to_bus", "susceptance", "limit", "is_tie_line"]
THERMAL_COLS = [
    "id", "bus", "technology", "p_min", "p_max", "startup_cap", "shutdown_cap", "ramp_up",
    "ramp_down", "min_up", "min_down", "cost_prod", "cost_startup", "scr_eligible",
    "tcr_eligible", "initial_on",
]
STORAGE_COLS = [
    "id", "bus", "kind", "p_max_dis", "p_max_ch", "e_min", "e_max", "e_initial", "eta_ch",
    "eta_dis", "cost_charge", "scr_eligible", "tcr_eligible",
]
RES_COLS = ["id", "bus", "technology", "p_max", "cost_prod"]
CANDIDATE_COLS = ["id", "kind", "invest_cost", "invest_cap_max", "counts_toward_res_target"]
RESERVE_SERIES = ["scr_up", "scr_down", "tcr_up", "tcr_down"]
RESERVE_COEFFS = ["a_wind_up", "a_wind_down", "a_pv_up", "a_pv_down"]

_INT_FIELDS = {"min_up", "min_down"}
_BOOL_FIELDS = {"is_tie_line", "scr_eligible", "tcr_eligible", "initial_on",
                "counts_toward_res_target"}
_STR_FIELDS = {"id", "zone", "bus", "from_bus", "to_bus", "technology", "kind"}


class DataError(Exception):
    """Malformed or inconsistent scenario data."""


def _parse_bool(text: str, where: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes"):
        return True
    if low in ("0", "false", "no", ""):
        return False
    raise DataError(f"{where}: cannot parse {text!r} as a boolean")


def _parse_value(col: str, text: str, where: str) -> Any:
    if col in _STR_FIELDS:
        if not text.strip():
            raise DataError(f"{where}: empty {col}")
        return text.strip()
    if col in _BOOL_FIELDS:
        return _parse_bool(text, where)
    try:
        if col in _INT_FIELDS:
            return int(text)
        return float(text)
    except ValueError:
        raise DataError(f"{where}: cannot parse {col}={text!r}") from None


def _read_table(path: Path, required: list[str], optional: bool = True) -> list[dict]:
    if not path.exists():
        if optional:
            return []
        raise DataError(f"missing file {path}")
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            return []
        missing = [c for c in required if c not in header]
        if missing:
            raise DataError(f"{path.name}: missing columns {missing}")
        for lineno, raw in enumerate(reader, start=2):
            if not raw or all(not c.strip() for c in raw):
                continue
            where = f"{path.name}:{lineno}"
            if len(raw) != len(header):
                raise DataError(f"{where}: expected {len(header)} fields, got {len(raw)}")
            rec = dict(zip(header, raw))
            rows.append({c: _parse_value(c, rec[c], where) for c in header if c in required})
    return rows


def _read_series(path: Path, n_hours: int, required: bool) -> dict[str, tuple[float, ...]]:
    if not path.exists():
        if required:
            raise DataError(f"missing file {path}")
        return {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path.name}: empty series file") from None
        if not header or header[0] != "hour":
            raise DataError(f"{path.name}: first column must be 'hour'")
        cols: list[list[float]] = [[] for _ in header[1:]]
        n = 0
        for lineno, raw in enumerate(reader, start=2):
            if not raw:
                continue
            n += 1
            if len(raw) != len(header):
                raise DataError(f"{path.name}:{lineno}: expected {len(header)} fields, got {len(raw)}")
            for k, text in enumerate(raw[1:]):
                try:
                    cols[k].append(float(text))
                except ValueError:
                    raise DataError(
                        f"{path.name}:{lineno}: cannot parse {header[k + 1]}={text!r}"
                    ) from None
    if n != n_hours:
        raise DataError(f"{path.name}: series has {n} rows, expected {n_hours}")
    return {name: tuple(col) for name, col in zip(header[1:], cols)}


def _config_from(doc: dict, where: str) -> ScenarioConfig:
    cfg = dict(doc.get("config") or {})
    target = None
    if cfg.get("res_target_twh") is not None:
        target = float(cfg.pop("res_target_twh")) * 1e6
    else:
        cfg.pop("res_target_twh", None)
    if cfg.get("res_target_mwh") is not None:
        target = float(cfg.pop("res_target_mwh"))
    else:
        cfg.pop("res_target_mwh", None)
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(cfg) - known
    if unknown:
        raise DataError(f"{where}: unknown config keys {sorted(unknown)}")
    try:
        return ScenarioConfig(res_target_energy=target, **cfg)
    except (TypeError, ValueError) as exc:
        raise DataError(f"{where}: {exc}") from None


def load_scenario(directory: str | Path) -> tuple[PowerSystem, ScenarioConfig]:
    """Read and validate a scenario directory."""
    root = Path(directory)
    man = root / MANIFEST
    if not man.exists():
        raise DataError(f"missing file {man}")
    try:
        doc = yaml.safe_load(man.read_text()) or {}
    except yaml.YAMLError as exc:
        raise DataError(f"{MANIFEST}: {exc}") from None
    config = _config_from(doc, MANIFEST)
    n = HOURS_PER_YEAR
    sdir = root / "series"

    bus_rows = _read_table(root / "buses.csv", BUS_COLS, optional=False)
    bus_ids = {r["id"] for r in bus_rows}
    demand = _read_series(sdir / "demand.csv", n, required=True)
    fixed = _read_series(sdir / "fixed_injection.csv", n, required=False)
    avail = _read_series(sdir / "availability.csv", n, required=False)
    inflow = _read_series(sdir / "inflow.csv", n, required=False)
    cf = _read_series(sdir / "capacity_factor.csv", n, required=False)
    reserves = _read_series(sdir / "reserves.csv", n, required=False)

    buses = []
    for r in bus_rows:
        if r["id"] not in demand:
            raise DataError(f"demand.csv: no column for bus {r['id']!r}")
        buses.append(Bus(r["id"], r["zone"], demand[r["id"]],
                         fixed.get(r["id"], (0.0,) * n)))

    def check_bus(table: str, rec: dict, key: str = "bus") -> None:
        if rec[key] not in bus_ids:
            raise DataError(f"{table}: {rec['id']!r} references unknown bus {rec[key]!r}")

    lines = []
    for r in _read_table(root / "lines.csv", LINE_COLS):
        check_bus("lines.csv", r, "from_bus")
        check_bus("lines.csv", r, "to_bus")
        lines.append(Line(**r))

    thermal = {}
    for r in _read_table(root / "thermal_units.csv", THERMAL_COLS):
        check_bus("thermal_units.csv", r)
        thermal[r["id"]] = ThermalUnit(availability=avail.get(r["id"], (1.0,) * n), **r)
    storage = {}
    for r in _read_table(root / "storage_units.csv", STORAGE_COLS):
        check_bus("storage_units.csv", r)
        try:
            storage[r["id"]] = StorageUnit(inflow=inflow.get(r["id"], (0.0,) * n), **r)
        except ValueError as exc:
            raise DataError(f"storage_units.csv: {r['id']!r}: {exc}") from None
    res = {}
    for r in _read_table(root / "res_units.csv", RES_COLS):
        check_bus("res_units.csv", r)
        if r["id"] not in cf:
            raise DataError(f"capacity_factor.csv: no column for unit {r['id']!r}")
        try:
            res[r["id"]] = ResUnit(capacity_factor=cf[r["id"]], **r)
        except ValueError as exc:
            raise DataError(f"res_units.csv: {r['id']!r}: {exc}") from None

    candidates = []
    pools = {CandidateKind.THERMAL: thermal, CandidateKind.STORAGE: storage,
             CandidateKind.RES: res}
    for r in _read_table(root / "candidates.csv", CANDIDATE_COLS):
        try:
            kind = CandidateKind(r["kind"])
        except ValueError:
            raise DataError(f"candidates.csv: {r['id']!r} has unknown kind {r['kind']!r}") from None
        payload = pools[kind].pop(r["id"], None)
        if payload is None:
            raise DataError(f"candidates.csv: no {kind.value} record with id {r['id']!r}")
        candidates.append(CandidateUnit(
            r["id"], kind, payload, r["invest_cost"], r["invest_cap_max"],
            r["counts_toward_res_target"],
        ))

    coeffs = {k: float(v) for k, v in (doc.get("reserves") or {}).items()}
    unknown = set(coeffs) - set(RESERVE_COEFFS)
    if unknown:
        raise DataError(f"{MANIFEST}: unknown reserve keys {sorted(unknown)}")
    zero = (0.0,) * n
    policy = ReservePolicy(*(reserves.get(k, zero) for k in RESERVE_SERIES), **coeffs)

    system = PowerSystem(
        buses=tuple(buses),
        lines=tuple(lines),
        thermal=tuple(thermal.values()),
        storage=tuple(storage.values()),
        res=tuple(res.values()),
        candidates=tuple(candidates),
        reserves=policy,
        n_hours=n,
    )
    report = validate_system(system, config)
    if not report.ok:
        raise DataError(f"scenario {root} failed validation:\n{report}")
    return system, config


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------

def fmt(x: float) -> str:
    """Round-trip exact float text."""
    x = float(x)
    if x == 0.0:
        return "0"
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return fmt(value)
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))


def _series_text(columns: dict[str, tuple[float, ...]], n: int) -> str:
    names = list(columns)
    rows = [[t] + [columns[c][t] for c in names] for t in range(n)]
    return csv_text(["hour"] + names, rows)


def save_scenario(system: PowerSystem, config: ScenarioConfig, directory: str | Path) -> None:
    """Write ``system`` in the layout read by :func:`load_scenario`."""
    root = Path(directory)
    n = system.n_hours
    cfg = {
        "load_shed_cost": config.load_shed_cost,
        "res_target_mwh": config.res_target_energy,
        "water_incentive": config.water_incentive,
        "slack_bus": config.slack_bus,
        "compression": config.compression.value,
        "base_mva": config.base_mva,
        "storage_cost_side": config.storage_cost_side.value,
    }
    pol = system.reserves
    doc = {"config": cfg, "reserves": {k: getattr(pol, k) for k in RESERVE_COEFFS}}
    _write(root / MANIFEST, yaml.safe_dump(doc, sort_keys=True))

    def rows(units, cols):
        return [[getattr(u, c) for c in cols] for u in units]

    cand_payload = [c.payload for c in system.candidates]
    thermal = list(system.thermal) + [p for p in cand_payload if isinstance(p, ThermalUnit)]
    storage = list(system.storage) + [p for p in cand_payload if isinstance(p, StorageUnit)]
    res = list(system.res) + [p for p in cand_payload if isinstance(p, ResUnit)]

    _write(root / "buses.csv", csv_text(BUS_COLS, rows(system.buses, BUS_COLS)))
    _write(root / "lines.csv", csv_text(LINE_COLS, rows(system.lines, LINE_COLS)))
    _write(root / "thermal_units.csv", csv_text(THERMAL_COLS, rows(thermal, THERMAL_COLS)))
    _write(root / "storage_units.csv", csv_text(STORAGE_COLS, rows(storage, STORAGE_COLS)))
    _write(root / "res_units.csv", csv_text(RES_COLS, rows(res, RES_COLS)))
    _write(root / "candidates.csv", csv_text(
        CANDIDATE_COLS,
        [[c.id, c.kind, float(c.invest_cost), float(c.invest_cap_max), c.counts_toward_res_target]
         for c in system.candidates],
    ))
    sdir = root / "series"
    _write(sdir / "demand.csv", _series_text({b.id: b.demand for b in system.buses}, n))
    _write(sdir / "fixed_injection.csv",
           _series_text({b.id: b.fixed_injection for b in system.buses}, n))
    _write(sdir / "availability.csv", _series_text({u.id: u.availability for u in thermal}, n))
    _write(sdir / "inflow.csv", _series_text({s.id: s.inflow for s in storage}, n))
    _write(sdir / "capacity_factor.csv",
           _series_text({r.id: r.capacity_factor for r in res}, n))
    _write(sdir / "reserves.csv",
           _series_text({k: getattr(pol, k) for k in RESERVE_SERIES}, n))


def write_json(path: Path, doc: dict) -> None:
    _write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
