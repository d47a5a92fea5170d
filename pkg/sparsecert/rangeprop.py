"""
Range property certificates.

For an order k, every admissible sign pattern (Lambda1, Lambda2) with
|Lambda1| + |Lambda2| = k and |Lambda2| <= 1 needs a vector eta = A^T y with
eta_i = 1 on Lambda1, eta_i = -1 on Lambda2 and |eta_j| < 1 elsewhere. Each
pattern is one small LP:

    minimize t  over (y free, t >= 0, s >= 0)
    a_i^T y = +1           i in Lambda1
    a_i^T y = -1           i in Lambda2
    +a_j^T y - t + s_j = 0 j outside
    -a_j^T y - t + s'_j = 0

and the pattern passes when the optimum t is below 1 by the strict margin.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .config import ToleranceConfig
from .errors import BudgetExhaustedError, NotApplicableError, SparseCertError
from .linalg import DenseMatrix
from .simplex import LpProblem, LpStatus, solve_lp
from .spark import first_dependent_subset

logger = logging.getLogger(__name__)

SignPattern = Tuple[Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class PatternMargin:
    """Optimal off-support magnitude t for one sign pattern (inf when infeasible)."""

    positive: Tuple[int, ...]
    negative: Tuple[int, ...]
    t: float
    diagnostic: Optional[str] = None


@dataclass(frozen=True)
class RangePropertyCertificate:
    order: int
    holds: bool
    failing_pair: Optional[SignPattern]
    margins: Tuple[PatternMargin, ...]
    max_duality_residual: float = 0.0

    @property
    def worst_margin(self) -> float:
        """Largest t over all patterns; 0 when there are none."""
        return max((m.t for m in self.margins), default=0.0)


def pattern_count(n: int, k: int) -> int:
    return math.comb(n, k) * (k + 1)


def sign_patterns(n: int, k: int) -> Iterator[SignPattern]:
    """All (Lambda1, Lambda2) of order k, subsets in lexicographic order."""
    for support in itertools.combinations(range(n), k):
        yield support, ()
        for i in support:
            yield tuple(j for j in support if j != i), (i,)


def _pattern_problem(A: np.ndarray, positive: Tuple[int, ...], negative: Tuple[int, ...]) -> LpProblem:
    m, n = A.shape
    support = set(positive) | set(negative)
    outside = [j for j in range(n) if j not in support]
    n_slack = 2 * len(outside)
    n_vars = m + 1 + n_slack  # y, t, slacks

    rows = []
    rhs = []
    for i in positive:
        rows.append(np.concatenate([A[:, i], np.zeros(1 + n_slack)]))
        rhs.append(1.0)
    for i in negative:
        rows.append(np.concatenate([A[:, i], np.zeros(1 + n_slack)]))
        rhs.append(-1.0)
    for k, j in enumerate(outside):
        for sign, slot in ((1.0, 2 * k), (-1.0, 2 * k + 1)):
            row = np.zeros(n_vars)
            row[:m] = sign * A[:, j]
            row[m] = -1.0
            row[m + 1 + slot] = 1.0
            rows.append(row)
            rhs.append(0.0)

    objective = np.zeros(n_vars)
    objective[m] = 1.0
    bounds = tuple([(None, None)] * m + [(0.0, None)] * (1 + n_slack))
    return LpProblem(objective, np.array(rows).reshape(len(rows), n_vars), np.array(rhs), bounds)


def range_property_ii(A: DenseMatrix, k: int,
                      budget: int = ToleranceConfig.DEFAULT_LP_PAIR_BUDGET) -> RangePropertyCertificate:
    """
    Check the order-k range property by one LP per sign pattern.

    Raises:
        NotApplicableError: k outside [0, n]
        BudgetExhaustedError: more than `budget` patterns would be needed
    """
    m, n = A.shape
    if k < 0 or k > n:
        raise NotApplicableError(f"Range property order k={k} must lie in [0, {n}]")
    if k == 0:
        return RangePropertyCertificate(0, True, None, ())

    count = pattern_count(n, k)
    if count > budget:
        raise BudgetExhaustedError(
            0, 0, message=f"{count} sign patterns needed for k={k}, budget is {budget}"
        )

    threshold = 1.0 - ToleranceConfig.STRICT_MARGIN
    margins: List[PatternMargin] = []
    failing: Optional[SignPattern] = None
    worst_residual = 0.0
    for positive, negative in sign_patterns(n, k):
        diagnostic = None
        try:
            result = solve_lp(_pattern_problem(A.array, positive, negative))
            if result.status is LpStatus.OPTIMAL:
                t = float(result.value)
                worst_residual = max(worst_residual, result.certificate_residual or 0.0)
            else:
                t = math.inf
                diagnostic = f"pattern LP is {result.status.value}"
        except SparseCertError as e:
            t = math.inf
            diagnostic = f"pattern LP failed: {e}"
        margins.append(PatternMargin(positive, negative, t, diagnostic))
        if failing is None and not t < threshold:
            failing = (positive, negative)
            logger.debug("range property of order %d fails at %s / %s (t=%s)", k, positive, negative, t)

    return RangePropertyCertificate(k, failing is None, failing, tuple(margins), worst_residual)


def null_space_constant_exists(A: DenseMatrix, k: int,
                               budget: int = ToleranceConfig.DEFAULT_SPARK_BUDGET) -> bool:
    """
    True iff every k columns of A are linearly independent, the condition
    under which a null space constant of order k exists.

    Raises:
        NotApplicableError: k outside [0, n]
        BudgetExhaustedError: shares the spark search budget
    """
    m, n = A.shape
    if k < 0 or k > n:
        raise NotApplicableError(f"Order k={k} must lie in [0, {n}]")
    if k == 0:
        return True
    if k > m:
        return False
    witness, _ = first_dependent_subset(A, k, budget)
    return witness is None
