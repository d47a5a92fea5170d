"""
Support overlap of the solution set of Ax = b.

Column i belongs to S* (the intersection of the supports of all solutions)
exactly when b is not in the span of the other columns, which is a pair of
rank tests:

    i in S*  <=>  rank([A_-i | b]) = rank(A_-i) + 1
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .coherence import CoherenceSummary
from .errors import DimensionMismatchError, InfeasibleError
from .linalg import DenseMatrix, count_sparsity, least_squares_solution, null_space_basis, submatrix_rank
from .spark import SparkValue, rank_one_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupportOverlap:
    indices: Tuple[int, ...]
    feasible: bool = True

    @property
    def cardinality(self) -> int:
        return len(self.indices)


def _check_rhs(A: DenseMatrix, b) -> np.ndarray:
    b = np.asarray(b, dtype=float).reshape(-1)
    if b.size != A.rows:
        raise DimensionMismatchError(f"Right-hand side has length {b.size}, expected {A.rows}")
    return b


def is_feasible(A: DenseMatrix, b) -> bool:
    """rank([A | b]) == rank(A)."""
    b = _check_rhs(A, b)
    return submatrix_rank(np.column_stack([A.array, b])) == submatrix_rank(A.array)


def support_overlap(A: DenseMatrix, b) -> SupportOverlap:
    """
    Indices every solution of Ax = b uses.

    Raises:
        InfeasibleError: Ax = b has no solution
    """
    b = _check_rhs(A, b)
    if not is_feasible(A, b):
        raise InfeasibleError("b is not in the range of A; the support overlap is undefined")

    indices = []
    for i in range(A.cols):
        rest = A.delete_column(i)
        if submatrix_rank(np.column_stack([rest, b])) == submatrix_rank(rest) + 1:
            indices.append(i)
    logger.debug("support overlap: %s", indices)
    return SupportOverlap(tuple(indices))


def overlap_threshold(overlap: SupportOverlap, spark_value: SparkValue) -> float:
    """(|S*| + spark) / 2; spark_value may be a certified lower bound."""
    return (overlap.cardinality + spark_value) / 2.0


def overlap_verdict(x, spark_value: SparkValue, overlap: SupportOverlap,
                    zero_tol: Optional[float] = None) -> bool:
    """||x||_0 < (|S*| + spark) / 2, strictly."""
    return count_sparsity(x, zero_tol) < overlap_threshold(overlap, spark_value)


def overlap_rank_one_threshold(gamma_star: int, summary: CoherenceSummary) -> float:
    """
    gamma*/2 plus the rank-one half-bound; needs alpha = 1 and mu < 1.

    Raises:
        NotApplicableError: from the rank-one bound
    """
    if gamma_star < 0:
        raise ValueError("gamma_star must be nonnegative")
    return gamma_star / 2.0 + rank_one_bound(summary) / 2.0


def sample_solutions(A: DenseMatrix, b, count: int, seed: int = 0) -> List[np.ndarray]:
    """The minimum-norm solution followed by random null-space perturbations of it."""
    b = _check_rhs(A, b)
    particular = least_squares_solution(A, b)
    basis = null_space_basis(A)
    rng = np.random.default_rng(seed)
    samples = [particular]
    for _ in range(max(count - 1, 0)):
        if basis.shape[1] == 0:
            samples.append(particular.copy())
        else:
            samples.append(particular + basis @ rng.standard_normal(basis.shape[1]))
    return samples


def solution_support_products(solutions: Sequence[np.ndarray],
                              zero_tol: Optional[float] = None) -> List[int]:
    """||diag(x) u||_0 for every ordered pair (x, u) of the given solutions."""
    counts = []
    for x in solutions:
        for u in solutions:
            product = np.asarray(x) * np.asarray(u)
            tol = zero_tol
            if tol is None:
                scale = float(np.abs(x).max(initial=0.0) * np.abs(u).max(initial=0.0))
                tol = 1e-10 * scale
            counts.append(count_sparsity(product, tol))
    return counts
