"""
Babel and sub-Babel functions of a normalized Gram matrix.

Each row of |G| is sorted in descending order with the unit diagonal dropped;
mu1(q) is the largest sum of the first q entries over all rows, and the
sub-Babel value repeats the maximization with the maximizing row k0 removed.
The two threshold indices

    q_hat  = min{q : mu1(q-1) >= 1}
    q_star = min{q : mu1(q-1) * mu1_sub(q-1) >= 1}

are both lower bounds on the spark, with q_star >= q_hat.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .coherence import CoherenceSummary
from .config import ToleranceConfig
from .errors import MissingThresholdError
from .linalg import GramMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BabelProfile:
    """
    Babel values indexed by q = 1..n-1 (stored at position q-1).

    q_hat / q_star are None when no q in [1, n] meets the condition.
    """

    n: int
    babel: Tuple[float, ...]
    sub_babel: Tuple[float, ...]
    maximizing_row: Tuple[int, ...]
    q_hat: Optional[int]
    q_star: Optional[int]

    def mu1(self, q: int) -> float:
        """mu1(q) with mu1(0) = 0."""
        if q == 0:
            return 0.0
        return self.babel[q - 1]

    def mu1_sub(self, q: int) -> float:
        if q == 0:
            return 0.0
        return self.sub_babel[q - 1]


def _row_sorted_abs(G: GramMatrix) -> np.ndarray:
    """n x (n-1) matrix whose k-th row holds row k's off-diagonal |G| sorted descending."""
    n = G.dim
    values = np.abs(G.entries)
    off = values[~np.eye(n, dtype=bool)].reshape(n, n - 1)
    return -np.sort(-off, axis=1)


def _first_threshold(values, slack: float) -> Optional[int]:
    """Smallest q in [1, n] with values(q - 1) >= 1, where values(0) = 0."""
    for q, value in enumerate(values, start=1):
        if value >= 1.0 - slack:
            return q
    return None


def babel_profile(G: GramMatrix, slack: float = ToleranceConfig.THRESHOLD_SLACK) -> BabelProfile:
    """
    Build the Babel profile of a normalized Gram matrix.

    Args:
        G: Gram matrix of a column-normalized matrix, n >= 2
        slack: sums within this distance below 1 already count as reaching 1,
            which can only lower the thresholds

    Returns:
        BabelProfile
    """
    if not G.source_normalized:
        raise ValueError("babel_profile needs the Gram matrix of a column-normalized matrix")
    n = G.dim
    if n < 2:
        raise ValueError("Babel functions need at least two columns")

    partial = np.cumsum(_row_sorted_abs(G), axis=1)

    babel, sub_babel, rows = [], [], []
    for q in range(1, n):
        sums = partial[:, q - 1]
        k0 = int(np.argmax(sums))  # smallest index among ties
        others = np.delete(sums, k0)
        babel.append(float(sums[k0]))
        sub_babel.append(float(others.max()))
        rows.append(k0)

    # position 0 stands for q - 1 = 0
    babel_shifted = [0.0] + babel
    product_shifted = [0.0] + [b * s for b, s in zip(babel, sub_babel)]
    q_hat = _first_threshold(babel_shifted, slack)
    q_star = _first_threshold(product_shifted, slack)

    logger.debug("babel thresholds: q_hat=%s q_star=%s", q_hat, q_star)
    return BabelProfile(n, tuple(babel), tuple(sub_babel), tuple(rows), q_hat, q_star)


def sub_babel_strict_gain_holds(profile: BabelProfile) -> bool:
    """
    Whether mu1_sub(q_hat - 1) * mu1(q_hat - 1) < 1, the condition under which
    q_star > q_hat strictly.

    Raises:
        MissingThresholdError: if q_hat does not exist
    """
    if profile.q_hat is None:
        raise MissingThresholdError("q_hat does not exist for this profile")
    q = profile.q_hat - 1
    return profile.mu1_sub(q) * profile.mu1(q) < 1.0


def babel_dominates_case1(profile: BabelProfile, summary: CoherenceSummary) -> Optional[bool]:
    """
    When alpha <= q_hat - 1 and alpha < 1/mu, q_hat is at least the first
    closed-form estimate of the coherence-rank bound. Returns None when the
    premise does not hold, otherwise whether the inequality was observed.
    """
    if profile.q_hat is None or summary.mu2 is None or summary.unbounded:
        return None
    if not (summary.alpha <= profile.q_hat - 1 and summary.alpha * summary.mu < 1.0):
        return None
    case1 = 1.0 + (1.0 - summary.alpha * (summary.mu - summary.mu2)) / summary.mu2
    return profile.q_hat >= case1 - 1e-9


def sub_babel_dominates_psi(profile: BabelProfile, summary: CoherenceSummary, psi: float) -> Optional[bool]:
    """q_star >= psi whenever alpha < 1/mu and alpha <= q_star - 1; None when the premise fails."""
    if profile.q_star is None or summary.unbounded:
        return None
    if not (summary.alpha * summary.mu < 1.0 and summary.alpha <= profile.q_star - 1):
        return None
    return profile.q_star >= psi - 1e-9
