"""
Uniqueness verdicts.

evaluate() runs every criterion that applies to a system Ax = b and compares
the sparsity of an optional candidate solution with each criterion's
threshold. A criterion's threshold is half of a certified lower bound on the
spark (or the overlap-augmented value), so a candidate strictly below any
threshold is the unique sparsest solution.

Criterion names are stable identifiers; scaled criteria are prefixed with the
scaling they came from ("phi_b:", "svd:", "search:", "scaled[<label>]:").
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from .config import AnalysisConfig, ToleranceConfig
from .errors import (
    DimensionMismatchError,
    InvalidCandidateError,
    NoApplicableCriterionError,
    SparseCertError,
)
from .linalg import DenseMatrix, count_sparsity
from .overlap import (
    SupportOverlap,
    overlap_rank_one_threshold,
    overlap_threshold,
    overlap_verdict,
    support_overlap,
)
from .rangeprop import RangePropertyCertificate, null_space_constant_exists, range_property_ii
from .scaling import (
    ScaledCertificates,
    ScalingKind,
    ScalingSpec,
    phi_diagonal_from_b,
    scaled_certificates,
    search_scaling,
    svd_scaling,
)
from .spark import SparkReport, spark_report

logger = logging.getLogger(__name__)

__all__ = [
    "AnalysisOptions",
    "Conclusion",
    "Criterion",
    "SystemInstance",
    "UniquenessVerdict",
    "best_recoverable_sparsity",
    "count_sparsity",
    "evaluate",
    "strongest_criterion",
]


class Conclusion(Enum):
    UNIQUE_SPARSEST = "UniqueSparsest"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Criterion:
    """
    One uniqueness test.

    Strict criteria pass when sparsity < threshold; inclusive ones when
    sparsity <= threshold. non_strict_passed records the "<=" reading of the
    searched-scaling criterion and never counts toward the conclusion.
    """

    name: str
    applicable: bool
    threshold: Optional[float]
    passed: bool
    provenance: str
    inclusive: bool = False
    diagnostic: Optional[str] = None
    non_strict_passed: Optional[bool] = None


@dataclass(frozen=True, eq=False)
class SystemInstance:
    """
    A linear system Ax = b with an optional candidate solution.

    Raises:
        DimensionMismatchError: on inconsistent shapes
        InvalidCandidateError: when the candidate does not solve the system
    """

    A: DenseMatrix
    b: np.ndarray
    candidate: Optional[np.ndarray] = None
    gamma_star: Optional[int] = None
    scalings: Tuple[ScalingSpec, ...] = ()

    def __post_init__(self):
        b = np.array(self.b, dtype=float).reshape(-1)
        if b.size != self.A.rows:
            raise DimensionMismatchError(f"Right-hand side has length {b.size}, expected {self.A.rows}")
        b.flags.writeable = False
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "scalings", tuple(self.scalings))
        if self.gamma_star is not None and self.gamma_star < 0:
            raise ValueError("gamma_star must be nonnegative")

        if self.candidate is not None:
            x = np.array(self.candidate, dtype=float).reshape(-1)
            if x.size != self.A.cols:
                raise DimensionMismatchError(f"Candidate has length {x.size}, expected {self.A.cols}")
            residual = float(np.linalg.norm(self.A.array @ x - b))
            tolerance = ToleranceConfig.CANDIDATE_RESIDUAL_TOL * max(1.0, float(np.linalg.norm(b)))
            if residual > tolerance:
                raise InvalidCandidateError(residual, tolerance)
            x.flags.writeable = False
            object.__setattr__(self, "candidate", x)


@dataclass(frozen=True)
class AnalysisOptions:
    """Which criterion families evaluate() runs, and with what tolerances."""

    tie_tol: float = ToleranceConfig.DEFAULT_TIE_TOL
    want_exact: bool = True
    budget: int = ToleranceConfig.DEFAULT_SPARK_BUDGET
    include_babel: bool = True
    include_phi_b: bool = True
    include_svd: bool = False
    search_trials: int = 0
    seed: int = 0
    range_property_k: Optional[int] = None
    zero_tol: Optional[float] = None
    lp_budget: int = ToleranceConfig.DEFAULT_LP_PAIR_BUDGET

    @classmethod
    def from_config(cls, config: Optional[AnalysisConfig] = None, **overrides) -> "AnalysisOptions":
        """Options seeded from the environment; keyword overrides win."""
        config = config or AnalysisConfig()
        values = dict(
            tie_tol=config.tie_tolerance,
            budget=config.spark_budget,
            seed=config.seed,
            search_trials=config.search_trials,
            lp_budget=config.lp_pair_budget,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True, eq=False)
class UniquenessVerdict:
    """Per-criterion results plus everything they were computed from."""

    candidate: Optional[np.ndarray]
    sparsity: Optional[int]
    criteria: Tuple[Criterion, ...]
    conclusion: Conclusion
    report: SparkReport
    overlap: Optional[SupportOverlap] = None
    scaled: Tuple[ScaledCertificates, ...] = ()
    range_certificate: Optional[RangePropertyCertificate] = None
    diagnostics: Tuple[str, ...] = field(default_factory=tuple)

    def criterion(self, name: str) -> Criterion:
        for c in self.criteria:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def passing(self) -> List[Criterion]:
        return [c for c in self.criteria if c.passed]


class _Judge:
    """Builds Criterion records against one candidate sparsity."""

    def __init__(self, sparsity: Optional[int]):
        self.sparsity = sparsity
        self.slack = ToleranceConfig.VERDICT_SLACK

    def passes(self, threshold: float, inclusive: bool = False) -> bool:
        if self.sparsity is None:
            return False
        if inclusive:
            return self.sparsity <= threshold + self.slack
        return self.sparsity < threshold - self.slack

    def half_bound(self, name: str, bound: Optional[float], provenance: str,
                   diagnostic: Optional[str] = None) -> Criterion:
        if bound is None:
            return Criterion(name, False, None, False, provenance,
                             diagnostic=diagnostic or "preconditions do not hold")
        threshold = bound / 2.0
        return Criterion(name, True, threshold, self.passes(threshold), provenance, diagnostic=diagnostic)

    def threshold(self, name: str, threshold: float, provenance: str, inclusive: bool = False,
                  diagnostic: Optional[str] = None) -> Criterion:
        return Criterion(name, True, threshold, self.passes(threshold, inclusive), provenance,
                         inclusive=inclusive, diagnostic=diagnostic)

    @staticmethod
    def inapplicable(name: str, provenance: str, diagnostic: str, inclusive: bool = False) -> Criterion:
        return Criterion(name, False, None, False, provenance, inclusive=inclusive, diagnostic=diagnostic)


def _diagnostic_for(report: SparkReport, *prefixes: str) -> Optional[str]:
    found = [d for d in report.diagnostics if d.startswith(prefixes)]
    return "; ".join(found) if found else None


def _spark_criteria(judge: _Judge, report: SparkReport, want_exact: bool) -> List[Criterion]:
    criteria = []
    provenance = "spark(A)/2"
    if report.exact_is_infinite:
        criteria.append(judge.threshold(
            "exact_spark", math.inf, provenance,
            diagnostic="columns are linearly independent (outside m<n): every solution is unique",
        ))
    elif report.exact is not None:
        criteria.append(judge.half_bound("exact_spark", float(report.exact), provenance))
    elif report.partial_lower_bound is not None:
        criteria.append(judge.half_bound(
            "exact_spark", float(report.partial_lower_bound), provenance,
            diagnostic=f"search budget exhausted; certified spark >= {report.partial_lower_bound}",
        ))
    else:
        reason = "exact search disabled" if not want_exact else _diagnostic_for(report, "exact")
        criteria.append(judge.inapplicable("exact_spark", provenance, reason or "not computed"))

    coherence_diag = _diagnostic_for(report, "coherence")
    criteria.extend([
        judge.half_bound("mutual_coherence", report.classic_bound,
                         "(1 + 1/mu)/2", coherence_diag),
        judge.half_bound("babel", report.babel_bound,
                         "q_hat/2 from the Babel function", _diagnostic_for(report, "babel")),
        judge.half_bound("coherence_rank", report.psi_bound,
                         "psi(alpha, beta, mu, mu2)/2 for matrices in M",
                         _diagnostic_for(report, "psi_bound", "coherence")),
        judge.half_bound("coherence_rank_m1", report.psi_case1,
                         "first closed-form estimate of psi, matrices in M1",
                         _diagnostic_for(report, "closed-form", "coherence")),
        judge.half_bound("coherence_rank_m2", report.psi_case2,
                         "second closed-form estimate of psi, matrices in M2",
                         _diagnostic_for(report, "closed-form", "coherence")),
        judge.half_bound("coherence_rank_one", report.rank_one_bound,
                         "alpha = 1 specialization of psi",
                         _diagnostic_for(report, "rank_one_bound", "coherence")),
        judge.half_bound("sub_babel", report.sub_babel_bound,
                         "q_star/2 from the sub-Babel function", _diagnostic_for(report, "babel")),
    ])
    return criteria


def _scaled_criteria(judge: _Judge, certs: ScaledCertificates, prefix: str) -> List[Criterion]:
    report = certs.report
    label = certs.spec.label
    if certs.spec.kind is ScalingKind.SEARCH:
        name = f"{prefix}mutual_coherence"
        provenance = f"(1 + 1/mu(WA))/2 for the best W found in {certs.spec.trials} trials"
        criterion = judge.half_bound(name, report.classic_bound, provenance)
        if criterion.applicable and judge.sparsity is not None:
            criterion = Criterion(
                criterion.name, True, criterion.threshold, criterion.passed, provenance,
                diagnostic="'<=' form reported in non_strict_passed; it does not count",
                non_strict_passed=judge.sparsity <= criterion.threshold,
            )
        return [criterion]
    return [
        judge.half_bound(f"{prefix}mutual_coherence", report.classic_bound,
                         f"(1 + 1/mu(WA))/2 with W = {label}", _diagnostic_for(report, "coherence")),
        judge.half_bound(f"{prefix}coherence_rank", report.psi_bound,
                         f"psi on WA for WA in M, W = {label}",
                         _diagnostic_for(report, "psi_bound", "coherence")),
        judge.half_bound(f"{prefix}coherence_rank_m1", report.psi_case1,
                         f"first closed-form estimate on WA, W = {label}",
                         _diagnostic_for(report, "closed-form", "coherence")),
        judge.half_bound(f"{prefix}coherence_rank_m2", report.psi_case2,
                         f"second closed-form estimate on WA, W = {label}",
                         _diagnostic_for(report, "closed-form", "coherence")),
        judge.half_bound(f"{prefix}coherence_rank_one", report.rank_one_bound,
                         f"alpha = 1 specialization of psi on WA, W = {label}",
                         _diagnostic_for(report, "rank_one_bound", "coherence")),
    ]


def _collect_scalings(instance: SystemInstance, options: AnalysisOptions,
                      diagnostics: List[str]) -> List[Tuple[ScalingSpec, str]]:
    specs: List[Tuple[ScalingSpec, str]] = []
    for index, spec in enumerate(instance.scalings):
        label = spec.label if spec.label and spec.label != spec.kind.value else f"W{index}"
        specs.append((spec, f"scaled[{label}]:"))
    if options.include_phi_b:
        specs.append((phi_diagonal_from_b(instance.b), "phi_b:"))
    if options.include_svd:
        try:
            specs.append((svd_scaling(instance.A), "svd:"))
        except SparseCertError as e:
            diagnostics.append(f"svd scaling: {e}")
    if options.search_trials > 0:
        specs.append((search_scaling(instance.A, options.search_trials, options.seed), "search:"))
    return specs


def evaluate(instance: SystemInstance, options: Optional[AnalysisOptions] = None) -> UniquenessVerdict:
    """
    Evaluate every applicable uniqueness criterion for the instance.

    Module failures become inapplicable criteria with diagnostics. Without a
    candidate, thresholds are still reported and nothing passes.
    """
    options = options or AnalysisOptions()
    A = instance.A
    diagnostics: List[str] = []
    sparsity = None
    if instance.candidate is not None:
        sparsity = count_sparsity(instance.candidate, options.zero_tol)
    judge = _Judge(sparsity)

    report = spark_report(A, options.tie_tol, options.want_exact, options.budget, options.include_babel)
    criteria = _spark_criteria(judge, report, options.want_exact)

    scaled: List[ScaledCertificates] = []
    for spec, prefix in _collect_scalings(instance, options, diagnostics):
        try:
            certs = scaled_certificates(A, spec, options.tie_tol, want_exact=False,
                                        include_babel=False, baseline=report)
        except SparseCertError as e:
            diagnostics.append(f"{prefix} {e}")
            continue
        scaled.append(certs)
        criteria.extend(_scaled_criteria(judge, certs, prefix))

    # the spark is invariant under scaling, so every report bounds it
    if report.exact is not None:
        spark_value = float(report.exact)
    else:
        spark_value = max([report.best_certified] + [c.report.best_certified for c in scaled])

    overlap = None
    try:
        overlap = support_overlap(A, instance.b)
    except SparseCertError as e:
        diagnostics.append(f"support overlap: {e}")
        criteria.append(judge.inapplicable("support_overlap", "(|S*| + spark)/2", str(e)))
        criteria.append(judge.inapplicable("support_overlap_rank_one", "gamma*/2 + rank-one bound/2", str(e)))

    if overlap is not None:
        passed = instance.candidate is not None and overlap_verdict(
            instance.candidate, spark_value, overlap, options.zero_tol)
        criteria.append(Criterion(
            "support_overlap", True, overlap_threshold(overlap, spark_value), passed, "(|S*| + spark)/2",
            diagnostic=None if report.exact is not None else "spark replaced by its best certified lower bound",
        ))
        gamma = instance.gamma_star if instance.gamma_star is not None else overlap.cardinality
        if report.summary is None:
            criteria.append(judge.inapplicable("support_overlap_rank_one", "gamma*/2 + rank-one bound/2",
                                               "coherence statistics unavailable"))
        else:
            try:
                criteria.append(judge.threshold(
                    "support_overlap_rank_one", overlap_rank_one_threshold(gamma, report.summary),
                    "gamma*/2 + rank-one bound/2", diagnostic=f"gamma* = {gamma}",
                ))
            except SparseCertError as e:
                criteria.append(judge.inapplicable("support_overlap_rank_one",
                                                   "gamma*/2 + rank-one bound/2", str(e)))

    range_certificate = None
    if options.range_property_k is not None:
        order_k, range_certificate = _order_k_criteria(judge, A, options.range_property_k, options, diagnostics)
        criteria.extend(order_k)

    conclusion = Conclusion.UNIQUE_SPARSEST if any(c.passed for c in criteria) else Conclusion.INCONCLUSIVE
    logger.info("verdict: %s (sparsity=%s, %d criteria, %d passed)",
                conclusion.value, sparsity, len(criteria), sum(c.passed for c in criteria))
    return UniquenessVerdict(
        candidate=instance.candidate,
        sparsity=sparsity,
        criteria=tuple(criteria),
        conclusion=conclusion,
        report=report,
        overlap=overlap,
        scaled=tuple(scaled),
        range_certificate=range_certificate,
        diagnostics=tuple(diagnostics + list(report.diagnostics)),
    )


def _order_k_criteria(judge: _Judge, A: DenseMatrix, k: int, options: AnalysisOptions,
                      diagnostics: List[str]) -> Tuple[List[Criterion], Optional[RangePropertyCertificate]]:
    """Null-space-constant and range-property criteria; both pass on sparsity <= k/2."""
    criteria = []
    m, n = A.shape
    threshold = k / 2.0

    nsp_provenance = f"k/2 with every {k} columns independent"
    if m >= n:
        criteria.append(judge.inapplicable("null_space_constant", nsp_provenance,
                                           "needs m < n", inclusive=True))
    else:
        try:
            if null_space_constant_exists(A, k, options.budget):
                criteria.append(judge.threshold("null_space_constant", threshold, nsp_provenance,
                                                inclusive=True))
            else:
                criteria.append(judge.inapplicable("null_space_constant", nsp_provenance,
                                                   f"some {k} columns are linearly dependent", inclusive=True))
        except SparseCertError as e:
            diagnostics.append(f"null space constant: {e}")
            criteria.append(judge.inapplicable("null_space_constant", nsp_provenance, str(e), inclusive=True))

    rp_provenance = f"k/2 under the order-{k} range property of A^T"
    certificate = None
    try:
        certificate = range_property_ii(A, k, options.lp_budget)
    except SparseCertError as e:
        diagnostics.append(f"range property: {e}")
        criteria.append(judge.inapplicable("range_property", rp_provenance, str(e), inclusive=True))
        return criteria, None

    if certificate.holds:
        criteria.append(judge.threshold("range_property", threshold, rp_provenance, inclusive=True))
    else:
        positive, negative = certificate.failing_pair
        criteria.append(judge.inapplicable(
            "range_property", rp_provenance,
            f"fails for positive={list(positive)} negative={list(negative)}", inclusive=True,
        ))
    return criteria, certificate


def strongest_criterion(criteria) -> Optional[Criterion]:
    """Applicable criterion with the largest threshold; earlier ones win ties within VERDICT_SLACK."""
    best: Optional[Criterion] = None
    for c in criteria:
        if c.applicable and c.threshold is not None and (
                best is None or c.threshold > best.threshold + ToleranceConfig.VERDICT_SLACK):
            best = c
    return best


def best_recoverable_sparsity(instance: SystemInstance,
                              options: Optional[AnalysisOptions] = None) -> Tuple[float, str]:
    """
    Largest threshold among applicable criteria and the criterion that owns it.

    Any solution with sparsity strictly below the level is certified unique;
    the first criterion in evaluation order wins ties (thresholds within
    VERDICT_SLACK of each other count as tied).

    Raises:
        NoApplicableCriterionError: nothing applies
    """
    verdict = evaluate(instance, options)
    best = strongest_criterion(verdict.criteria)
    if best is None:
        raise NoApplicableCriterionError([c.diagnostic or c.name for c in verdict.criteria])
    return best.threshold, best.name
