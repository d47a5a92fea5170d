"""
Coherence statistics of a column-normalized matrix.

mu is the largest off-diagonal |G_ij|, mu2 the largest value strictly below it,
and the per-row tie counts give the coherence rank alpha and the
sub-coherence rank beta. Ties are decided with an explicit tolerance because
matrices transcribed at four decimals never tie exactly.

Rows are scanned over all n rows of the n x n Gram matrix.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .config import ToleranceConfig
from .errors import DegenerateCoherenceError, NotApplicableError
from .linalg import DenseMatrix, GramMatrix, normalize_columns, normalized_gram

logger = logging.getLogger(__name__)

# |G_ij| this close to 1 means numerically parallel columns
_PARALLEL_SLACK = 64 * ToleranceConfig.MACHINE_EPSILON


class ClassMembership(Enum):
    """Membership in the coherence-rank class M = M1 u M2."""
    M1 = "M1"
    M2 = "M2"
    NOT_IN_M = "NotInM"


@dataclass(frozen=True, eq=False)
class CoherenceSummary:
    """
    mu, mu2, alpha, beta and the per-row tie counts of a normalized Gram matrix.

    mu2 is None when every off-diagonal value ties with mu. `unbounded` marks
    the orthogonal case mu = 0 (1/mu = +inf), where alpha = n - 1 is reported
    but must not feed any bound.
    """

    mu: float
    mu2: Optional[float]
    alpha: int
    beta: int
    row_tie_counts: Tuple[int, ...]
    tie_tolerance: float
    unbounded: bool = False

    @property
    def n(self) -> int:
        return len(self.row_tie_counts)

    @property
    def mu_tilde(self) -> Optional[float]:
        """mu - mu2, the coherence gap."""
        if self.mu2 is None:
            return None
        return self.mu - self.mu2

    @property
    def degenerate(self) -> bool:
        return self.mu2 is None


def _snap_parallel(values: np.ndarray, tie_tolerance: float) -> np.ndarray:
    """Clamp entries within tolerance of 1 to exactly 1 (and never above 1)."""
    slack = max(tie_tolerance, _PARALLEL_SLACK)
    out = np.minimum(values, 1.0)
    out[out >= 1.0 - slack] = 1.0
    return out


def coherence_summary(G: GramMatrix, tie_tolerance: float = ToleranceConfig.DEFAULT_TIE_TOL,
                      allow_degenerate: bool = False) -> CoherenceSummary:
    """
    Compute the coherence family of statistics from a normalized Gram matrix.

    Args:
        G: Gram matrix built from column-normalized data
        tie_tolerance: values within this distance of mu count as equal to mu
        allow_degenerate: return a summary with mu2=None instead of raising
            when every off-diagonal value ties with mu

    Returns:
        CoherenceSummary

    Raises:
        ValueError: if G is not normalized or n < 2
        DegenerateCoherenceError: if mu2 is undefined and allow_degenerate is False
    """
    if not G.source_normalized:
        raise ValueError("coherence_summary needs the Gram matrix of a column-normalized matrix")
    n = G.dim
    if n < 2:
        raise ValueError("coherence statistics need at least two columns")
    if tie_tolerance < 0:
        raise ValueError("tie_tolerance must be nonnegative")

    values = _snap_parallel(G.abs_off_diagonal(), tie_tolerance)
    off_mask = ~np.eye(n, dtype=bool)
    mu = float(values[off_mask].max())

    if mu == 0.0:
        logger.info("All columns are mutually orthogonal; 1/mu is unbounded")
        counts = tuple([n - 1] * n)
        return CoherenceSummary(0.0, None, n - 1, n - 1, counts, tie_tolerance, unbounded=True)

    cutoff = mu - tie_tolerance
    ties = (values >= cutoff) & off_mask
    counts = tuple(int(c) for c in ties.sum(axis=1))
    ordered = sorted(counts, reverse=True)
    alpha, beta = ordered[0], ordered[1]

    below = values[off_mask & ~ties]
    mu2 = float(below.max()) if below.size else None

    summary = CoherenceSummary(mu, mu2, alpha, beta, counts, tie_tolerance)
    if mu2 is None and not allow_degenerate:
        raise DegenerateCoherenceError(mu)
    logger.debug("coherence: mu=%.6g mu2=%s alpha=%d beta=%d", mu, mu2, alpha, beta)
    return summary


def coherence_summary_of(A: DenseMatrix, tie_tolerance: float = ToleranceConfig.DEFAULT_TIE_TOL,
                         allow_degenerate: bool = False) -> CoherenceSummary:
    """Normalize A, build its Gram matrix and summarize it."""
    return coherence_summary(normalized_gram(A), tie_tolerance, allow_degenerate)


def mutual_coherence(A: DenseMatrix) -> float:
    """mu of the column-normalized A, without tie bookkeeping."""
    normalized, _ = normalize_columns(A)
    product = np.abs(normalized.array.T @ normalized.array)
    np.fill_diagonal(product, 0.0)
    return float(_snap_parallel(product, 0.0).max())


def membership_flags(s: CoherenceSummary) -> Tuple[bool, bool]:
    """(A in M1, A in M2); comparisons are done as alpha*mu against 1."""
    if s.unbounded or s.mu <= 0.0:
        raise NotApplicableError("class membership needs mu > 0")
    in_m1 = s.alpha * s.mu < 1.0
    in_m2 = s.alpha * s.mu <= 1.0 and s.beta < s.alpha
    return in_m1, in_m2


def class_membership(s: CoherenceSummary) -> ClassMembership:
    """
    Classify the matrix behind `s` into M1, M2 or neither.

    M1 wins when both hold; the two bounds coincide there.
    """
    in_m1, in_m2 = membership_flags(s)
    if in_m1:
        return ClassMembership.M1
    if in_m2:
        return ClassMembership.M2
    return ClassMembership.NOT_IN_M
