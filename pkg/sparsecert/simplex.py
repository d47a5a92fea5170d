"""
Dense two-phase simplex for small linear programs.

Problems are stated as

    minimize    c^T x
    subject to  A_eq x = b_eq,  lo_j <= x_j <= hi_j

and rewritten to standard form (nonnegative variables, equality rows) before
the tableau is built. Pivoting follows Bland's rule, so cycling cannot occur;
the iteration cap only guards against numerical trouble.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from .config import ToleranceConfig
from .errors import CycleDetectedError, InvalidLpError, NumericalBreakdownError

logger = logging.getLogger(__name__)

Bound = Tuple[Optional[float], Optional[float]]

# ratio-test entries at or below this are treated as zero
_ENTRY_TOL = 1e-9


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LpProblem:
    """
    A linear program over n variables with equality rows and variable bounds.

    bounds[j] = (lo, hi); None stands for an infinite side. The default is
    x_j >= 0.
    """

    objective: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    bounds: Tuple[Bound, ...] = ()

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        n = c.size
        A = np.asarray(self.eq_matrix, dtype=float)
        if A.size == 0:
            A = np.zeros((0, n))
        b = np.asarray(self.eq_rhs, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[1] != n:
            raise InvalidLpError(f"Equality matrix has shape {A.shape}, expected (*, {n})")
        if b.size != A.shape[0]:
            raise InvalidLpError(f"Equality rhs has length {b.size}, expected {A.shape[0]}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise InvalidLpError("Linear program data must be finite")

        bounds = tuple(self.bounds) if self.bounds else tuple((0.0, None) for _ in range(n))
        if len(bounds) != n:
            raise InvalidLpError(f"Got {len(bounds)} bounds for {n} variables")
        for j, (lo, hi) in enumerate(bounds):
            if lo is not None and hi is not None and lo > hi:
                raise InvalidLpError(f"Variable {j} has empty bounds [{lo}, {hi}]")

        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "eq_matrix", A)
        object.__setattr__(self, "eq_rhs", b)
        object.__setattr__(self, "bounds", bounds)

    @property
    def num_variables(self) -> int:
        return self.objective.size

    @property
    def num_constraints(self) -> int:
        return self.eq_rhs.size


@dataclass(frozen=True, eq=False)
class LpResult:
    """
    Outcome of solve_lp.

    duals has one entry per equality row of the original problem; the
    certificate residual is |c^T x - duality value| at the optimum.
    """

    status: LpStatus
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    duals: Optional[np.ndarray] = None
    certificate_residual: Optional[float] = None
    iterations: int = 0


@dataclass
class _StandardForm:
    """min c^T z, M z = r, z >= 0 with x = offset + T z."""

    c: np.ndarray
    M: np.ndarray
    r: np.ndarray
    transform: np.ndarray
    offset: np.ndarray
    constant: float
    user_rows: int


def _to_standard_form(p: LpProblem) -> _StandardForm:
    n = p.num_variables
    columns: List[np.ndarray] = []  # columns of the transform x = offset + T z
    offset = np.zeros(n)
    bound_rows: List[Tuple[int, float]] = []  # (z index, upper limit of z)

    for j, (lo, hi) in enumerate(p.bounds):
        unit = np.zeros(n)
        unit[j] = 1.0
        if lo is not None:
            offset[j] = lo
            columns.append(unit)
            if hi is not None:
                bound_rows.append((len(columns) - 1, hi - lo))
        elif hi is not None:
            offset[j] = hi
            columns.append(-unit)
        else:
            columns.append(unit)
            columns.append(-unit)

    T = np.column_stack(columns) if columns else np.zeros((n, 0))
    nz = T.shape[1]
    total = nz + len(bound_rows)

    M = np.zeros((p.num_constraints + len(bound_rows), total))
    r = np.zeros(M.shape[0])
    M[:p.num_constraints, :nz] = p.eq_matrix @ T
    r[:p.num_constraints] = p.eq_rhs - p.eq_matrix @ offset
    for k, (z_index, limit) in enumerate(bound_rows):
        row = p.num_constraints + k
        M[row, z_index] = 1.0
        M[row, nz + k] = 1.0
        r[row] = limit

    c = np.zeros(total)
    c[:nz] = T.T @ p.objective
    full_T = np.hstack([T, np.zeros((n, len(bound_rows)))])
    return _StandardForm(c, M, r, full_T, offset, float(p.objective @ offset), p.num_constraints)


class _Tableau:
    """Simplex tableau with the reduced-cost row stored last."""

    def __init__(self, table: np.ndarray, basis: List[int], pivot_tol: float, max_iterations: int):
        self.T = table
        self.basis = basis
        self.pivot_tol = pivot_tol
        self.max_iterations = max_iterations
        self.iterations = 0

    def pivot(self, row: int, col: int):
        piv = self.T[row, col]
        if abs(piv) < self.pivot_tol:
            raise NumericalBreakdownError(piv)
        self.T[row, :] /= piv
        for r in range(self.T.shape[0]):
            if r != row and self.T[r, col] != 0.0:
                self.T[r, :] -= self.T[r, col] * self.T[row, :]
        self.basis[row] = col

    def _entering(self, allowed: int) -> int:
        # Bland: lowest index with negative reduced cost
        costs = self.T[-1, :allowed]
        candidates = np.flatnonzero(costs < -_ENTRY_TOL)
        return int(candidates[0]) if candidates.size else -1

    def _leaving(self, col: int) -> int:
        rhs = self.T[:-1, -1]
        column = self.T[:-1, col]
        best_row, best_ratio = -1, math.inf
        for i in np.flatnonzero(column > _ENTRY_TOL):
            ratio = rhs[i] / column[i]
            # ties go to the smallest basic variable index
            if ratio < best_ratio - 1e-12 or (
                abs(ratio - best_ratio) <= 1e-12 and self.basis[i] < self.basis[best_row]
            ):
                best_row, best_ratio = int(i), ratio
        return best_row

    def run(self, allowed: int) -> LpStatus:
        """Iterate to optimality over the first `allowed` columns."""
        while True:
            col = self._entering(allowed)
            if col == -1:
                return LpStatus.OPTIMAL
            row = self._leaving(col)
            if row == -1:
                return LpStatus.UNBOUNDED
            if self.iterations >= self.max_iterations:
                raise CycleDetectedError(f"Simplex did not finish within {self.max_iterations} pivots")
            self.pivot(row, col)
            self.iterations += 1


def _phase_one(sf: _StandardForm, pivot_tol: float, max_iterations: int
               ) -> Tuple[Optional[_Tableau], np.ndarray, np.ndarray]:
    """
    Find a feasible basis. Returns (tableau or None if infeasible, row signs,
    indices of the rows kept after dropping redundant ones).
    """
    rows, cols = sf.M.shape
    signs = np.where(sf.r < 0, -1.0, 1.0)
    M = sf.M * signs[:, None]
    r = sf.r * signs

    table = np.zeros((rows + 1, cols + rows + 1))
    table[:rows, :cols] = M
    table[:rows, cols:cols + rows] = np.eye(rows)
    table[:rows, -1] = r
    # phase-one costs: 1 on every artificial
    table[-1, :cols] = -M.sum(axis=0)
    table[-1, -1] = -r.sum()

    tableau = _Tableau(table, list(range(cols, cols + rows)), pivot_tol, max_iterations)
    tableau.run(cols + rows)

    if -tableau.T[-1, -1] > ToleranceConfig.LP_FEASIBILITY_TOL * max(1.0, float(np.abs(r).max(initial=0.0))):
        return None, signs, np.arange(rows)

    keep = []
    for i in range(rows):
        if tableau.basis[i] < cols:
            keep.append(i)
            continue
        row_entries = np.abs(tableau.T[i, :cols])
        j = int(np.argmax(row_entries)) if cols else -1
        if j >= 0 and row_entries[j] > _ENTRY_TOL:
            tableau.pivot(i, j)
            keep.append(i)
        else:
            logger.debug("dropping redundant constraint row %d", i)

    kept = np.array(keep, dtype=int)
    reduced = np.vstack([tableau.T[kept][:, list(range(cols)) + [-1]], np.zeros((1, cols + 1))])
    basis = [tableau.basis[i] for i in keep]
    phase_two = _Tableau(reduced, basis, pivot_tol, max_iterations)
    phase_two.iterations = tableau.iterations
    return phase_two, signs, kept


def solve_lp(p: LpProblem) -> LpResult:
    """
    Solve a small linear program with the two-phase simplex method.

    Raises:
        InvalidLpError: more than LP_MAX_SIZE variables plus constraints
        NumericalBreakdownError: a pivot below LP_PIVOT_TOL
        CycleDetectedError: the iteration cap was hit
    """
    settings = ToleranceConfig.get_lp_settings()
    if p.num_variables + p.num_constraints > settings["max_size"]:
        raise InvalidLpError(
            f"Linear program with {p.num_variables} variables and {p.num_constraints} "
            f"constraints exceeds the limit of {settings['max_size']}"
        )

    sf = _to_standard_form(p)
    rows, cols = sf.M.shape
    max_iterations = 50 * (rows + cols + 1)
    tableau, signs, kept = _phase_one(sf, settings["pivot_tol"], max_iterations)
    if tableau is None:
        logger.debug("phase one ended with positive artificial sum: infeasible")
        return LpResult(LpStatus.INFEASIBLE)

    # phase two reduced costs
    T = tableau.T
    T[-1, :cols] = sf.c
    T[-1, -1] = 0.0
    for i, b in enumerate(tableau.basis):
        if sf.c[b] != 0.0:
            T[-1, :] -= sf.c[b] * T[i, :]

    status = tableau.run(cols)
    if status is LpStatus.UNBOUNDED:
        return LpResult(LpStatus.UNBOUNDED, iterations=tableau.iterations)

    z = np.zeros(cols)
    for i, b in enumerate(tableau.basis):
        z[b] = max(T[i, -1], 0.0)
    x = sf.offset + sf.transform @ z
    value = float(sf.c @ z) + sf.constant

    # duals from B^T y = c_B on the kept (sign-adjusted) rows
    B = (sf.M[kept] * signs[kept][:, None])[:, tableau.basis]
    y_kept = np.linalg.lstsq(B.T, sf.c[tableau.basis], rcond=None)[0] if kept.size else np.zeros(0)
    y = np.zeros(rows)
    y[kept] = y_kept * signs[kept]
    residual = abs(float(sf.c @ z) - float(sf.r @ y))
    if residual > settings["certificate_tol"] * max(1.0, abs(value)):
        logger.warning("simplex optimum has duality residual %.3e", residual)

    return LpResult(
        LpStatus.OPTIMAL,
        x=x,
        value=value,
        duals=y[:sf.user_rows],
        certificate_residual=residual,
        iterations=tableau.iterations,
    )
