"""
Spark of a matrix: exact combinatorial search and coherence-based lower bounds.

The exact search enumerates column subsets in increasing size, lexicographic
within a size, and stops at the first numerically rank-deficient subset. The
lower bounds need only the Gram matrix:

    classic      1 + 1/mu
    psi          the coherence-rank bound (needs membership in M1 or M2)
    case1/case2  its two closed-form estimates
    rank one     the alpha = 1 specialization
    q_hat/q_star Babel thresholds

spark_report gathers all of them; a failing piece becomes an absent field
plus a diagnostic, never a failed report.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .babel import BabelProfile, babel_profile
from .coherence import ClassMembership, CoherenceSummary, class_membership, coherence_summary
from .config import ToleranceConfig
from .errors import (
    BudgetExhaustedError,
    DegenerateCoherenceError,
    DimensionMismatchError,
    NotApplicableError,
    SparseCertError,
)
from .linalg import DenseMatrix, GramMatrix, normalized_gram, submatrix_rank

logger = logging.getLogger(__name__)

SparkValue = Union[int, float]


@dataclass(frozen=True)
class SparkReport:
    """
    Every spark bound that applies to one matrix.

    exact is math.inf when the columns are independent (n <= m, full column
    rank); when the search budget ran out, partial_lower_bound holds the
    certified value size_reached + 1 instead.
    """

    exact: Optional[SparkValue] = None
    witness: Optional[Tuple[int, ...]] = None
    partial_lower_bound: Optional[int] = None
    classic_bound: Optional[float] = None
    psi_bound: Optional[float] = None
    psi_case1: Optional[float] = None
    psi_case2: Optional[float] = None
    rank_one_bound: Optional[float] = None
    babel_bound: Optional[int] = None
    sub_babel_bound: Optional[int] = None
    best_certified: float = 1.0
    summary: Optional[CoherenceSummary] = None
    profile: Optional[BabelProfile] = None
    diagnostics: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def exact_is_infinite(self) -> bool:
        return self.exact is not None and math.isinf(self.exact)

    def lower_bounds(self) -> List[Tuple[str, float]]:
        """(name, value) of every present lower bound, exact spark excluded."""
        named = [
            ("classic", self.classic_bound),
            ("psi", self.psi_bound),
            ("psi_case1", self.psi_case1),
            ("psi_case2", self.psi_case2),
            ("rank_one", self.rank_one_bound),
            ("babel", self.babel_bound),
            ("sub_babel", self.sub_babel_bound),
            ("partial_search", self.partial_lower_bound),
        ]
        return [(name, float(value)) for name, value in named if value is not None]


def first_dependent_subset(A: DenseMatrix, max_size: int,
                           budget: int = ToleranceConfig.DEFAULT_SPARK_BUDGET
                           ) -> Tuple[Optional[Tuple[int, ...]], int]:
    """
    Lexicographically first rank-deficient column subset of size <= max_size.

    Returns:
        (subset or None, number of rank tests used)

    Raises:
        BudgetExhaustedError: after `budget` rank tests; size_reached is the
            largest size whose subsets were all tested
    """
    n = A.cols
    tests = 0
    for size in range(1, min(max_size, n) + 1):
        for subset in itertools.combinations(range(n), size):
            if tests >= budget:
                raise BudgetExhaustedError(size - 1, tests)
            tests += 1
            if submatrix_rank(A.select_columns(subset)) < size:
                logger.debug("dependent subset %s after %d tests", subset, tests)
                return subset, tests
    return None, tests


def exact_spark(A: DenseMatrix, budget: int = ToleranceConfig.DEFAULT_SPARK_BUDGET
                ) -> Tuple[SparkValue, Optional[Tuple[int, ...]]]:
    """
    Smallest number of linearly dependent columns of A.

    Returns:
        (spark, witness). spark is math.inf with witness None when every
        column subset is independent.

    Raises:
        BudgetExhaustedError: when the rank-test budget is spent first
    """
    m, n = A.shape
    # every (m+1)-subset is dependent, so the search never has to test that size
    witness, tests = first_dependent_subset(A, min(m, n), budget)
    if witness is not None:
        return len(witness), witness
    if n > m:
        logger.debug("no dependent subset up to size %d in %d tests; spark = m + 1", m, tests)
        return m + 1, tuple(range(m + 1))
    return math.inf, None


def gerschgorin_bound(mu: float) -> float:
    """1 + 1/mu, infinite for mu = 0."""
    if mu <= 0.0:
        return math.inf
    return 1.0 + 1.0 / mu


def psi_bound(s: CoherenceSummary) -> float:
    """
    Coherence-rank lower bound on the spark.

    Raises:
        DegenerateCoherenceError: when mu2 is absent or zero
        NotApplicableError: when the matrix is in neither M1 nor M2
    """
    if s.mu2 is None or s.mu2 <= 0.0:
        raise DegenerateCoherenceError(s.mu, "psi bound needs a positive sub-mutual coherence")
    if class_membership(s) is ClassMembership.NOT_IN_M:
        raise NotApplicableError(
            f"alpha={s.alpha}, beta={s.beta}, mu={s.mu:.6g}: matrix is in neither M1 nor M2"
        )
    alpha, beta, mu2 = s.alpha, s.beta, s.mu2
    gap = s.mu_tilde
    numerator = 2.0 * (1.0 - alpha * beta * gap ** 2)
    denominator = mu2 * (gap * (alpha + beta) + math.sqrt((gap * (alpha - beta)) ** 2 + 4.0))
    return 1.0 + numerator / denominator


def psi_closed_form_estimates(s: CoherenceSummary) -> Tuple[Optional[float], Optional[float]]:
    """
    The two closed-form estimates that psi dominates.

    case1 requires alpha < 1/mu, case2 requires alpha <= 1/mu and beta < alpha.

    Raises:
        DegenerateCoherenceError: mu2 absent
        NotApplicableError: neither precondition holds
    """
    if s.mu2 is None or s.mu2 <= 0.0:
        raise DegenerateCoherenceError(s.mu)
    if s.unbounded:
        raise NotApplicableError("closed-form estimates need mu > 0")
    mu, mu2, alpha = s.mu, s.mu2, s.alpha
    base = (1.0 + 1.0 / mu) + (1.0 / mu2 - 1.0 / mu) * (1.0 - alpha * mu)

    case1 = base if alpha * mu < 1.0 else None
    case2 = None
    if alpha * mu <= 1.0 and s.beta < alpha:
        gap = s.mu_tilde
        case2 = base + alpha * gap ** 2 / (mu2 * (1.0 + alpha * gap))

    if case1 is None and case2 is None:
        raise NotApplicableError("neither alpha < 1/mu nor (alpha <= 1/mu and beta < alpha) holds")
    return case1, case2


def rank_one_bound(s: CoherenceSummary) -> float:
    """Lower bound for coherence-rank-one matrices with mu < 1."""
    if s.alpha != 1 or not (0.0 < s.mu < 1.0):
        raise NotApplicableError("rank-one bound needs alpha = 1 and 0 < mu < 1")
    if s.mu2 is None or s.mu2 <= 0.0:
        raise DegenerateCoherenceError(s.mu)
    return 1.0 + 1.0 / s.mu + (1.0 / s.mu2 - 1.0 / s.mu) * (1.0 - s.mu)


def brauer_inclusion_check(G: GramMatrix, subset: Sequence[int]) -> bool:
    """
    Whether 0 lies in a Cassini oval of the Gram submatrix on `subset`.

    Holds for every linearly dependent subset; on an independent one the
    answer carries no meaning.
    """
    sub = G.submatrix(subset)
    size = sub.shape[0]
    if size < 2:
        # a dependent singleton is a zero column: the single Gerschgorin disc is {0}
        return bool(size == 1 and abs(sub[0, 0]) <= ToleranceConfig.ORTHOGONALITY_TOL)
    diag = np.abs(np.diag(sub))
    radii = np.abs(sub).sum(axis=1) - diag
    slack = ToleranceConfig.ORTHOGONALITY_TOL
    for i, j in itertools.combinations(range(size), 2):
        if diag[i] * diag[j] <= radii[i] * radii[j] + slack:
            return True
    return False


def spark_report(A: DenseMatrix, tie_tolerance: float = ToleranceConfig.DEFAULT_TIE_TOL,
                 want_exact: bool = True, budget: int = ToleranceConfig.DEFAULT_SPARK_BUDGET,
                 include_babel: bool = True) -> SparkReport:
    """
    Compute every applicable spark bound of A.

    Args:
        A: the matrix
        tie_tolerance: coherence tie tolerance
        want_exact: run the combinatorial search
        budget: rank-test budget of the search
        include_babel: compute the Babel thresholds

    Returns:
        SparkReport with best_certified = max over present bounds

    Raises:
        DimensionMismatchError: A has fewer than two rows
    """
    if A.rows < 2:
        raise DimensionMismatchError(f"Spark bounds need at least two rows, got {A.rows}")
    diagnostics: List[str] = []
    values = {}

    if want_exact:
        try:
            spark, witness = exact_spark(A, budget)
            values["exact"] = spark
            values["witness"] = witness
        except BudgetExhaustedError as e:
            values["partial_lower_bound"] = e.size_reached + 1
            diagnostics.append(f"exact spark: {e}")

    summary: Optional[CoherenceSummary] = None
    profile: Optional[BabelProfile] = None
    if A.cols < 2:
        diagnostics.append("coherence bounds need at least two columns")
    else:
        try:
            G = normalized_gram(A)
            summary = coherence_summary(G, tie_tolerance, allow_degenerate=True)
            if include_babel:
                profile = babel_profile(G)
        except SparseCertError as e:
            diagnostics.append(f"coherence: {e}")

    if summary is not None:
        values["classic_bound"] = gerschgorin_bound(summary.mu)
        if summary.degenerate and not summary.unbounded:
            diagnostics.append(f"coherence: {DegenerateCoherenceError(summary.mu)}")
        if not summary.unbounded:
            for key, compute in (("psi_bound", psi_bound), ("rank_one_bound", rank_one_bound)):
                try:
                    values[key] = compute(summary)
                except SparseCertError as e:
                    diagnostics.append(f"{key}: {e}")
            try:
                values["psi_case1"], values["psi_case2"] = psi_closed_form_estimates(summary)
            except SparseCertError as e:
                diagnostics.append(f"closed-form estimates: {e}")

    if profile is not None:
        values["babel_bound"] = profile.q_hat
        values["sub_babel_bound"] = profile.q_star
        if profile.q_hat is None:
            diagnostics.append("babel: q_hat does not exist")

    report = SparkReport(summary=summary, profile=profile, diagnostics=tuple(diagnostics), **values)
    candidates = [value for _, value in report.lower_bounds()]
    if report.exact is not None:
        candidates.append(float(report.exact))
    best = max(candidates) if candidates else 1.0
    report = replace(report, best_certified=best)

    if report.exact is not None and not report.exact_is_infinite:
        for name, value in report.lower_bounds():
            if value > report.exact + 1e-9:
                logger.warning("%s bound %.6g exceeds exact spark %d", name, value, report.exact)
    return report
