"""Best-bound branch and bound over binary variables, plus an enumeration oracle."""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time

import numpy as np

from ..milp import MilpModel, SolveStatus, Solution, VarKind
from .lp import SolveOptions, solve_lp

log = logging.getLogger(__name__)

MAX_ORACLE_BINARIES = 20


def _fixed_lp(model: MilpModel, lo, hi, binaries, assignment, options) -> Solution:
    lo = lo.copy()
    hi = hi.copy()
    lo[binaries] = assignment
    hi[binaries] = assignment
    return solve_lp(model, options, lo, hi)


def solve_milp(model: MilpModel, options: SolveOptions = SolveOptions()) -> Solution:
    """Minimize ``model`` with binaries enforced.

    Nodes are processed in order of their parent's LP bound (node id breaks
    ties); the branching column is the most fractional binary, lowest id first.
    Integral nodes are re-solved with binaries fixed to their rounded values so
    the incumbent is exactly integral. Duals are only reported when the model
    has no binaries.
    """
    binaries = np.array(model.binaries, dtype=int)
    lo0, hi0 = model.bounds()
    if binaries.size == 0:
        return solve_lp(model, options)

    start = time.monotonic()
    counter = itertools.count()
    incumbent: Solution | None = None
    heap: list[tuple[float, int, np.ndarray, np.ndarray]] = []
    heapq.heappush(heap, (-math.inf, next(counter), lo0.copy(), hi0.copy()))
    nodes = 0
    hit_limit = False
    unbounded = False

    def cutoff() -> float:
        if incumbent is None:
            return math.inf
        return incumbent.objective - options.mip_gap * max(1.0, abs(incumbent.objective))

    while heap:
        bound, _, lo, hi = heapq.heappop(heap)
        if incumbent is not None and bound >= cutoff():
            continue
        if options.node_limit is not None and nodes >= options.node_limit:
            hit_limit = True
            break
        if options.time_limit is not None and time.monotonic() - start > options.time_limit:
            hit_limit = True
            break
        nodes += 1
        relax = solve_lp(model, options, lo, hi)
        if relax.status is SolveStatus.UNBOUNDED:
            unbounded = True
            break
        if relax.status is not SolveStatus.OPTIMAL:
            if relax.status is SolveStatus.NUMERICAL:
                log.warning("node %d: LP relaxation failed numerically; pruned", nodes)
            continue
        if incumbent is not None and relax.objective >= cutoff():
            continue
        vals = relax.values[binaries]
        frac = np.minimum(vals - np.floor(vals), np.ceil(vals) - vals)
        frac = np.where(np.abs(vals - np.round(vals)) <= options.integrality_tol, 0.0, frac)
        if not np.any(frac > 0):
            fixed = _fixed_lp(model, lo, hi, binaries, np.round(vals), options)
            if fixed.status is SolveStatus.OPTIMAL and (
                incumbent is None or fixed.objective < incumbent.objective - 1e-12
            ):
                fixed.duals = None
                incumbent = fixed
            continue
        # argmax returns the first (lowest id) of equally fractional binaries
        k = int(np.argmax(frac))
        var = binaries[k]
        for value in (0.0, 1.0):
            clo, chi = lo.copy(), hi.copy()
            clo[var] = chi[var] = value
            heapq.heappush(heap, (relax.objective, next(counter), clo, chi))

    if unbounded:
        return Solution(SolveStatus.UNBOUNDED, nodes=nodes)
    if hit_limit:
        if incumbent is None:
            return Solution(SolveStatus.LIMIT, nodes=nodes)
        incumbent.status = SolveStatus.FEASIBLE
        incumbent.nodes = nodes
        return incumbent
    if incumbent is None:
        return Solution(SolveStatus.INFEASIBLE, nodes=nodes)
    incumbent.nodes = nodes
    return incumbent


def enumerate_oracle(model: MilpModel, options: SolveOptions = SolveOptions()) -> Solution:
    """Exact optimum by trying every binary assignment.

    Assignments are visited in lexicographic order (lowest id most significant,
    0 before 1); the first assignment reaching the best objective is kept.
    Partial assignments violating a row that contains only binaries are skipped,
    which removes infeasible leaves without solving their LP.
    """
    binaries = model.binaries
    if len(binaries) > MAX_ORACLE_BINARIES:
        raise ValueError(
            f"enumeration oracle limited to {MAX_ORACLE_BINARIES} binaries, model has {len(binaries)}"
        )
    if not binaries:
        return solve_lp(model, options)

    pos = {v: k for k, v in enumerate(binaries)}
    lo0, hi0 = model.bounds()
    tol = options.feasibility_tol
    # binary-only rows, grouped by the position of their last binary
    checks: dict[int, list] = {}
    for con in model.constraints:
        if con.terms and all(model.variables[v].kind is VarKind.BINARY for v, _ in con.terms):
            last = max(pos[v] for v, _ in con.terms)
            checks.setdefault(last, []).append(con)

    best: Solution | None = None
    assignment = np.zeros(len(binaries))
    bin_arr = np.array(binaries, dtype=int)

    def row_ok(con) -> bool:
        act = sum(c * assignment[pos[v]] for v, c in con.terms)
        if con.sense.value == "<=":
            return act <= con.rhs + tol
        if con.sense.value == ">=":
            return act >= con.rhs - tol
        return abs(act - con.rhs) <= tol

    def visit(k: int) -> None:
        nonlocal best
        if k == len(binaries):
            sol = _fixed_lp(model, lo0, hi0, bin_arr, assignment, options)
            if sol.status is SolveStatus.UNBOUNDED:
                raise _Unbounded
            if sol.status is SolveStatus.OPTIMAL and (
                best is None or sol.objective < best.objective - 1e-9 * (1 + abs(best.objective))
            ):
                sol.duals = None
                best = sol
            return
        var = binaries[k]
        for value in (0.0, 1.0):
            if value < lo0[var] or value > hi0[var]:
                continue
            assignment[k] = value
            if all(row_ok(con) for con in checks.get(k, ())):
                visit(k + 1)
        assignment[k] = 0.0

    try:
        visit(0)
    except _Unbounded:
        return Solution(SolveStatus.UNBOUNDED)
    if best is None:
        return Solution(SolveStatus.INFEASIBLE)
    return best


class _Unbounded(Exception):
    pass
