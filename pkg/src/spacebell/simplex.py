"""Dense two-phase tableau simplex for small equality-form LPs.

    minimize c @ x  subject to  A @ x = b,  x >= 0

Bland's rule picks both the entering and the leaving variable, so the method
terminates on degenerate problems; it is meant for tableaus of a few dozen
columns where robustness matters more than speed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12
FEAS_TOL = 1e-10


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: LPStatus
    x: np.ndarray | None
    objective: float | None
    iterations: int
    # For INFEASIBLE: y with y @ A <= 0 componentwise and y @ b > 0 (Farkas).
    farkas: np.ndarray | None = None

    @property
    def success(self) -> bool:
        return self.status is LPStatus.OPTIMAL


class _Tableau:
    """Rows 0..m-1 hold [B^-1 A | B^-1 b]; row m holds reduced costs and -objective."""

    def __init__(self, table: np.ndarray, basis: list[int]):
        self.t = table
        self.basis = basis
        self.iterations = 0

    @property
    def m(self) -> int:
        return self.t.shape[0] - 1

    def pivot(self, row: int, col: int) -> None:
        t = self.t
        t[row] /= t[row, col]
        for r in range(t.shape[0]):
            if r != row and t[r, col] != 0.0:
                t[r] -= t[r, col] * t[row]
        t[:, col] = 0.0
        t[row, col] = 1.0
        self.basis[row] = col
        self.iterations += 1

    def run(self, ncols: int, max_iter: int) -> LPStatus:
        """Iterate Bland pivots over the first `ncols` columns until optimal or unbounded."""
        t = self.t
        while self.iterations < max_iter:
            cost = t[-1, :ncols]
            candidates = np.flatnonzero(cost < -PIVOT_TOL)
            if candidates.size == 0:
                return LPStatus.OPTIMAL
            col = int(candidates[0])
            column = t[: self.m, col]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                return LPStatus.UNBOUNDED
            ratios = t[rows, -1] / column[rows]
            best = ratios.min()
            # ties within rounding go to the lowest basic variable index
            tied = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
            row = int(min(tied, key=lambda r: self.basis[r]))
            self.pivot(row, col)
        raise RuntimeError(f"simplex exceeded {max_iter} iterations")


def linprog_eq(c, a_eq, b_eq, max_iter: int = 10_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    a = np.array(a_eq, dtype=float, ndmin=2)
    b = np.array(b_eq, dtype=float).reshape(-1)
    m, n = a.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError(f"shape mismatch: c {c.shape}, A {a.shape}, b {b.shape}")

    sign = np.where(b < 0, -1.0, 1.0)
    a = a * sign[:, None]
    b = b * sign

    # Phase 1: artificials n..n+m-1 start basic; minimize their sum.
    table = np.zeros((m + 1, n + m + 1))
    table[:m, :n] = a
    table[:m, n : n + m] = np.eye(m)
    table[:m, -1] = b
    table[m, :n] = -a.sum(axis=0)
    table[m, -1] = -b.sum()
    tab = _Tableau(table, list(range(n, n + m)))
    tab.run(n + m, max_iter)

    infeasibility = -tab.t[m, -1]
    if infeasibility > FEAS_TOL:
        # duals of the phase-1 problem: reduced cost of artificial k is 1 - y_k
        y = (1.0 - tab.t[m, n : n + m]) * sign
        return LPResult(LPStatus.INFEASIBLE, None, None, tab.iterations, farkas=y)

    # Drive remaining artificials out of the basis; rows with no original pivot are redundant.
    keep = []
    for r in range(m):
        if tab.basis[r] >= n:
            cols = np.flatnonzero(np.abs(tab.t[r, :n]) > PIVOT_TOL)
            if cols.size == 0:
                continue
            tab.pivot(r, int(cols[0]))
        keep.append(r)

    # Phase 2 on the original columns.
    rows = keep + [m]
    table2 = np.hstack([tab.t[np.ix_(rows, range(n))], tab.t[rows, -1:]])
    basis = [tab.basis[r] for r in keep]
    table2[-1, :] = 0.0
    table2[-1, :n] = c
    for r, j in enumerate(basis):
        if c[j] != 0.0:
            table2[-1] -= c[j] * table2[r]
    tab2 = _Tableau(table2, basis)
    tab2.iterations = tab.iterations
    status = tab2.run(n, max_iter)
    if status is LPStatus.UNBOUNDED:
        return LPResult(status, None, None, tab2.iterations)

    x = np.zeros(n)
    for r, j in enumerate(tab2.basis):
        x[j] = tab2.t[r, -1]
    return LPResult(LPStatus.OPTIMAL, x, float(c @ x), tab2.iterations)
