"""Dense bounded-variable primal simplex.

Rows ``rl <= A x <= ru`` are turned into equalities with one logical column per
row, ``A x - s = 0`` with ``rl <= s <= ru``, so every column carries its own
bounds and the all-logical basis is always a valid start. Phase 1 minimizes the
sum of bound infeasibilities of the basic columns (composite costs recomputed
every iteration), phase 2 the true objective. The basis inverse is kept
explicitly and refreshed periodically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AT_LOWER, AT_UPPER, AT_ZERO, BASIC = 0, 1, 2, 3


@dataclass
class SimplexResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit | numerical
    x: np.ndarray | None
    objective: float
    duals: np.ndarray | None
    iterations: int


def simplex(
    c: np.ndarray,
    A: np.ndarray,
    rl: np.ndarray,
    ru: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    feas_tol: float = 1e-7,
    opt_tol: float = 1e-7,
    max_iter: int | None = None,
    refactor_every: int = 64,
    stall_limit: int = 40,
) -> SimplexResult:
    m, n = A.shape
    N = n + m
    M = np.hstack([A, -np.eye(m)]) if m else np.zeros((0, n))
    L = np.concatenate([lo, rl]).astype(float)
    U = np.concatenate([hi, ru]).astype(float)
    cost = np.concatenate([c, np.zeros(m)]).astype(float)
    if max_iter is None:
        max_iter = 100 * (N + 10)

    status = np.empty(N, dtype=np.int8)
    x = np.zeros(N)
    for j in range(n):
        if np.isfinite(L[j]):
            status[j], x[j] = AT_LOWER, L[j]
        elif np.isfinite(U[j]):
            status[j], x[j] = AT_UPPER, U[j]
        else:
            status[j], x[j] = AT_ZERO, 0.0
    basis = np.arange(n, N)
    status[basis] = BASIC
    Binv = -np.eye(m)

    def recompute_basic() -> None:
        nonbasic = status != BASIC
        rhs = -(M[:, nonbasic] @ x[nonbasic]) if m else np.zeros(0)
        x[basis] = Binv @ rhs

    recompute_basic()

    bland = False
    stall = 0
    best_obj = np.inf
    since_refactor = 0
    it = 0
    phase = 1
    while it < max_iter:
        xb = x[basis]
        lb, ub = L[basis], U[basis]
        below = xb < lb - feas_tol
        above = xb > ub + feas_tol
        if below.any() or above.any():
            phase = 1
            cb = np.where(below, -1.0, np.where(above, 1.0, 0.0))
            cn_full = np.zeros(N)
        else:
            if phase == 1:
                stall, best_obj, bland = 0, np.inf, False
            phase = 2
            cb = cost[basis]
            cn_full = cost
        y = cb @ Binv if m else np.zeros(0)
        d = cn_full - y @ M if m else cn_full.copy()

        can_inc = ((status == AT_LOWER) | (status == AT_ZERO)) & (d < -opt_tol)
        can_dec = ((status == AT_UPPER) | (status == AT_ZERO)) & (d > opt_tol)
        cand = np.flatnonzero(can_inc | can_dec)
        if cand.size == 0:
            if phase == 1:
                return SimplexResult("infeasible", None, np.nan, None, it)
            break
        if bland:
            q = int(cand[0])
        else:
            q = int(cand[np.argmax(np.abs(d[cand]))])
        direction = 1.0 if d[q] < 0 else -1.0

        alpha = Binv @ M[:, q] if m else np.zeros(0)
        delta = -direction * alpha  # rate of change of basic values
        theta = U[q] - L[q]
        leave = -1
        leave_to_upper = False
        best_piv = 0.0
        piv_tol = 1e-9
        for i in np.flatnonzero(np.abs(delta) > piv_tol):
            rate = delta[i]
            v, lo_i, hi_i = xb[i], lb[i], ub[i]
            if rate < 0:
                if phase == 1 and above[i]:
                    limit, to_upper = (v - hi_i) / -rate, True
                elif phase == 1 and below[i]:
                    continue
                elif np.isfinite(lo_i):
                    limit, to_upper = max(v - lo_i, 0.0) / -rate, False
                else:
                    continue
            else:
                if phase == 1 and below[i]:
                    limit, to_upper = (lo_i - v) / rate, False
                elif phase == 1 and above[i]:
                    continue
                elif np.isfinite(hi_i):
                    limit, to_upper = max(hi_i - v, 0.0) / rate, True
                else:
                    continue
            piv = abs(rate)
            if limit < theta - 1e-12 or (
                limit <= theta + 1e-12
                and leave >= 0
                and (
                    (bland and basis[i] < basis[leave])
                    or (not bland and piv > best_piv)
                )
            ):
                theta, leave, leave_to_upper, best_piv = limit, i, to_upper, piv

        if not np.isfinite(theta):
            if phase == 2:
                return SimplexResult("unbounded", None, -np.inf, None, it)
            return SimplexResult("numerical", None, np.nan, None, it)

        it += 1
        x[q] += direction * theta
        if m:
            x[basis] += theta * delta
        if leave < 0:
            # bound flip of the entering column
            status[q] = AT_UPPER if direction > 0 else AT_LOWER
            x[q] = U[q] if direction > 0 else L[q]
        else:
            p = int(basis[leave])
            status[p] = AT_UPPER if leave_to_upper else AT_LOWER
            x[p] = U[p] if leave_to_upper else L[p]
            basis[leave] = q
            status[q] = BASIC
            piv = alpha[leave]
            row = Binv[leave] / piv
            Binv -= np.outer(alpha, row)
            Binv[leave] = row
            since_refactor += 1
            if since_refactor >= refactor_every:
                since_refactor = 0
                try:
                    Binv = np.linalg.inv(M[:, basis])
                except np.linalg.LinAlgError:
                    return SimplexResult("numerical", None, np.nan, None, it)
                recompute_basic()

        # degeneracy guard: fall back to Bland's rule while no progress is made
        obj_now = float(cost @ x) if phase == 2 else float(
            np.sum(np.maximum(L[basis] - x[basis], 0) + np.maximum(x[basis] - U[basis], 0))
        )
        if obj_now < best_obj - 1e-12 * (1 + abs(best_obj) if np.isfinite(best_obj) else 1):
            best_obj = obj_now
            stall = 0
            bland = False
        else:
            stall += 1
            if stall >= stall_limit:
                bland = True
    else:
        return SimplexResult("iteration_limit", None, np.nan, None, it)

    # final clean-up from a fresh factorization
    if m:
        try:
            Binv = np.linalg.inv(M[:, basis])
        except np.linalg.LinAlgError:
            return SimplexResult("numerical", None, np.nan, None, it)
        recompute_basic()
        y = cost[basis] @ Binv
    else:
        y = np.zeros(0)
    xs = x[:n].copy()
    return SimplexResult("optimal", xs, float(c @ xs), y, it)
