"""Command-line front end.

``gepflex run --scenario DIR --out DIR`` loads a scenario, builds the
expansion model, solves it, re-dispatches for prices and writes the result
tables. ``gepflex validate --scenario DIR`` only loads and checks the data.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .io import DataError, load_scenario
from .milp import ModelError, SolveStatus, write_mps
from .model import assemble
from .redispatch import price_dispatch
from .report import build_report, save_results
from .solver import SolveOptions, solve_milp
from .system import Compression

EXIT_OK = 0
EXIT_DATA = 3
EXIT_INFEASIBLE = 4
EXIT_LIMIT = 5
EXIT_OTHER = 6

_COMPRESSION = {"full": Compression.FULL_YEAR, "every-other-day": Compression.EVERY_OTHER_DAY}

log = logging.getLogger("gepflex")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gepflex", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="solve a scenario and write results")
    run.add_argument("--scenario", required=True, type=Path)
    run.add_argument("--compression", choices=sorted(_COMPRESSION))
    run.add_argument("--res-target", type=float, metavar="TWH",
                     help="renewable energy target, overrides the manifest")
    run.add_argument("--emit-mps", type=Path, metavar="PATH",
                     help="write the model in MPS format before solving")
    run.add_argument("--mip-gap", type=float, default=SolveOptions.mip_gap)
    run.add_argument("--time-limit", type=float, metavar="SECONDS")
    run.add_argument("--out", type=Path)

    val = sub.add_parser("validate", help="load and check a scenario")
    val.add_argument("--scenario", required=True, type=Path)
    return p


def run_scenario(args: argparse.Namespace) -> int:
    try:
        options = SolveOptions(mip_gap=args.mip_gap, time_limit=args.time_limit)
    except ValueError as exc:
        print(f"invalid option: {exc}", file=sys.stderr)
        return EXIT_OTHER
    try:
        system, config = load_scenario(args.scenario)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.compression:
        config = replace(config, compression=_COMPRESSION[args.compression])
    if args.res_target is not None:
        config = replace(config, res_target_energy=args.res_target * 1e6)

    try:
        model, registry = assemble(system, config, name=args.scenario.name or "gep")
    except ModelError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    log.info("model: %d variables, %d constraints, %d binaries",
             model.num_vars, model.num_constraints, len(model.binaries))
    if args.emit_mps:
        args.emit_mps.parent.mkdir(parents=True, exist_ok=True)
        write_mps(model, args.emit_mps)

    sol = solve_milp(model, options)
    status = sol.status
    print(f"status: {status.value}")
    if status is SolveStatus.INFEASIBLE:
        print("model is infeasible", file=sys.stderr)
        code = EXIT_INFEASIBLE
    elif status in (SolveStatus.LIMIT, SolveStatus.FEASIBLE):
        print("solver stopped at a node or time limit", file=sys.stderr)
        code = EXIT_LIMIT
    elif status is SolveStatus.OPTIMAL:
        code = EXIT_OK
    else:
        print(f"solver ended with status {status.value}", file=sys.stderr)
        code = EXIT_OTHER

    pricing = None
    if sol.values is not None:
        print(f"objective: {sol.objective:.6f}")
        try:
            pricing = price_dispatch(model, registry, sol, options=options)
        except ModelError as exc:
            print(f"pricing skipped: {exc}", file=sys.stderr)
    if args.out is not None:
        report = build_report(args.scenario.name, registry, status.value,
                              sol.objective if sol.values is not None else float("nan"),
                              sol.values, pricing)
        save_results(report, args.out)
    return code


def validate_scenario(args: argparse.Namespace) -> int:
    try:
        system, _ = load_scenario(args.scenario)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"ok: {len(system.buses)} buses, {len(system.lines)} lines, "
          f"{len(system.thermal)} thermal, {len(system.storage)} storage, "
          f"{len(system.res)} renewable, {len(system.candidates)} candidates")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return run_scenario(args)
    return validate_scenario(args)


if __name__ == "__main__":
    sys.exit(main())
