"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Solves  max c'x  s.t.  Ax = b, x >= 0  for the small dense equality-form
programs produced by the occupation-measure relaxation (a few hundred
variables at most).  Phase 1 drives artificial variables out of the basis;
redundant equality rows are tolerated by leaving zero-valued artificials
basic when no pivot is available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LpError(Exception):
    pass


class LpInfeasible(LpError):
    pass


class LpUnbounded(LpError):
    pass


@dataclass
class LpSolution:
    value: float
    x: np.ndarray
    basis: list[int]
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]


def _run_simplex(
    T: np.ndarray, basis: list[int], ncols: int, tol: float
) -> int:
    """Primal simplex on the tableau: objective in the last row, rhs in the
    last column.  Prices by largest reduced profit with a
    largest-pivot ratio tie-break; after a stretch of degenerate pivots it
    falls back to Bland's rule, which guarantees termination.  Returns the
    iteration count."""
    m = T.shape[0] - 1
    iters = 0
    degenerate_run = 0
    stall_limit = 10 * (m + ncols)
    while True:
        bland = degenerate_run > stall_limit
        red = T[-1, :ncols]
        if bland:
            col = -1
            for j in range(ncols):
                if red[j] > tol:
                    col = j
                    break
        else:
            col = int(np.argmax(red))
            if red[col] <= tol:
                col = -1
        if col < 0:
            return iters
        ratios = np.full(m, np.inf)
        piv = T[:m, col]
        ok = piv > tol
        ratios[ok] = T[:m, -1][ok] / piv[ok]
        best = ratios.min()
        if not np.isfinite(best):
            raise LpUnbounded("objective unbounded above")
        tie = np.flatnonzero(ratios <= best + tol * (1.0 + abs(best)))
        if bland:
            row = int(min(tie, key=lambda i: basis[i]))
        else:
            row = int(tie[np.argmax(piv[tie])])
        degenerate_run = degenerate_run + 1 if best <= tol else 0
        _pivot(T, row, col)
        basis[row] = col
        iters += 1
        if iters > 200_000:
            raise LpError("simplex iteration limit exceeded")


def solve_equality_lp(
    c: np.ndarray, A: np.ndarray, b: np.ndarray, tol: float = 1e-9
) -> LpSolution:
    """max c'x s.t. Ax = b, x >= 0."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError("inconsistent LP dimensions")

    A = A.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # Phase 1: artificials with objective -sum(artificials), maximised to 0.
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n, n + m))
    T[-1, : n + m] = -np.concatenate([np.zeros(n), np.ones(m)])
    for i in range(m):  # price out the initial basis
        T[-1] += T[i]
    it1 = _run_simplex(T, basis, n + m, tol)
    # the rhs cell carries the negated phase-1 objective, i.e. the total
    # remaining artificial mass; positive means no feasible point exists
    if T[-1, -1] > 1e-7:
        raise LpInfeasible(f"phase-1 infeasibility {T[-1, -1]!r} > 0")

    # Drive remaining artificials out where possible; rows whose artificial
    # cannot leave are redundant and stay basic at zero.
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if abs(T[i, j]) > tol:
                    _pivot(T, i, j)
                    basis[i] = j
                    break

    # Phase 2 on the original columns.
    T2 = np.zeros((m + 1, n + 1))
    T2[:m, :n] = T[:m, :n]
    T2[:m, -1] = T[:m, -1]
    T2[-1, :n] = c
    for i in range(m):
        if basis[i] < n and T2[-1, basis[i]] != 0.0:
            T2[-1] -= T2[-1, basis[i]] * T2[i]
    # columns of lingering artificials must never re-enter
    it2 = _run_simplex(T2, basis, n, tol)

    x = np.zeros(n)
    for i, v in enumerate(basis):
        if v < n:
            x[v] = T2[i, -1]
    return LpSolution(
        value=float(c @ x), x=x, basis=basis, iterations=it1 + it2
    )
