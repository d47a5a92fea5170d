"""
Pydantic models for the JSON analysis report.

The schema is versioned through `schemaVersion`. Infinite values are written
as null together with an explicit `*_infinite` flag, and floats use Python's
shortest round-trip repr, so a parsed report re-emits byte for byte.
"""

import json
import math
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .coherence import CoherenceSummary, class_membership, membership_flags
from .errors import SparseCertError
from .babel import BabelProfile
from .engine import Criterion, UniquenessVerdict, strongest_criterion
from .overlap import SupportOverlap
from .rangeprop import RangePropertyCertificate, pattern_count
from .scaling import ScaledCertificates
from .spark import SparkReport

SCHEMA_VERSION = 1


def _finite(value: Optional[float]) -> Tuple[Optional[float], bool]:
    """(value or None, infinite flag)."""
    if value is None:
        return None, False
    value = float(value)
    if math.isinf(value):
        return None, True
    if math.isnan(value):
        return None, False
    return value, False


class InputDescription(BaseModel):
    matrix_path: Optional[str] = None
    rhs_path: Optional[str] = None
    candidate_path: Optional[str] = None
    rows: int
    cols: int
    tie_tolerance: float
    seed: int = 0


class CoherenceModel(BaseModel):
    mu: float
    mu2: Optional[float] = None
    mu_tilde: Optional[float] = None
    alpha: int
    beta: int
    row_tie_counts: List[int]
    membership: Optional[str] = None
    in_m1: Optional[bool] = None
    in_m2: Optional[bool] = None
    orthogonal: bool = False

    @classmethod
    def from_summary(cls, s: CoherenceSummary) -> "CoherenceModel":
        membership, in_m1, in_m2 = None, None, None
        try:
            in_m1, in_m2 = membership_flags(s)
            membership = class_membership(s).value
        except SparseCertError:
            pass
        return cls(
            mu=s.mu, mu2=s.mu2, mu_tilde=s.mu_tilde, alpha=s.alpha, beta=s.beta,
            row_tie_counts=list(s.row_tie_counts), membership=membership,
            in_m1=in_m1, in_m2=in_m2, orthogonal=s.unbounded,
        )


class BabelModel(BaseModel):
    q_hat: Optional[int] = None
    q_star: Optional[int] = None
    babel: List[float]
    sub_babel: List[float]

    @classmethod
    def from_profile(cls, p: BabelProfile) -> "BabelModel":
        return cls(q_hat=p.q_hat, q_star=p.q_star, babel=list(p.babel), sub_babel=list(p.sub_babel))


class SparkModel(BaseModel):
    exact: Optional[int] = None
    exact_infinite: bool = False
    witness: Optional[List[int]] = None
    partial_lower_bound: Optional[int] = None
    classic_bound: Optional[float] = None
    classic_bound_infinite: bool = False
    psi_bound: Optional[float] = None
    psi_case1: Optional[float] = None
    psi_case2: Optional[float] = None
    rank_one_bound: Optional[float] = None
    babel_bound: Optional[int] = None
    sub_babel_bound: Optional[int] = None
    best_certified: Optional[float] = None
    best_certified_infinite: bool = False
    diagnostics: List[str] = Field(default_factory=list)

    @classmethod
    def from_report(cls, r: SparkReport) -> "SparkModel":
        exact = None if r.exact is None or r.exact_is_infinite else int(r.exact)
        classic, classic_inf = _finite(r.classic_bound)
        best, best_inf = _finite(r.best_certified)
        return cls(
            exact=exact,
            exact_infinite=r.exact_is_infinite,
            witness=list(r.witness) if r.witness is not None else None,
            partial_lower_bound=r.partial_lower_bound,
            classic_bound=classic,
            classic_bound_infinite=classic_inf,
            psi_bound=r.psi_bound,
            psi_case1=r.psi_case1,
            psi_case2=r.psi_case2,
            rank_one_bound=r.rank_one_bound,
            babel_bound=r.babel_bound,
            sub_babel_bound=r.sub_babel_bound,
            best_certified=best,
            best_certified_infinite=best_inf,
            diagnostics=list(r.diagnostics),
        )


class ScalingModel(BaseModel):
    label: str
    kind: str
    condition_number: float
    mu_upper_bound: Optional[float] = None
    trials: int = 0
    W: List[List[float]]
    coherence: Optional[CoherenceModel] = None
    spark: SparkModel
    deltas: Dict[str, Optional[float]] = Field(default_factory=dict)

    @classmethod
    def from_certificates(cls, c: ScaledCertificates) -> "ScalingModel":
        deltas = {}
        for name in c.comparison:
            delta = c.delta(name)
            deltas[name] = _finite(delta)[0]
        return cls(
            label=c.spec.label,
            kind=c.spec.kind.value,
            condition_number=c.spec.condition_number,
            mu_upper_bound=c.spec.mu_upper_bound,
            trials=c.spec.trials,
            W=c.spec.W.tolist(),
            coherence=CoherenceModel.from_summary(c.summary) if c.summary is not None else None,
            spark=SparkModel.from_report(c.report),
            deltas=deltas,
        )


class OverlapModel(BaseModel):
    indices: List[int]
    cardinality: int
    feasible: bool = True

    @classmethod
    def from_overlap(cls, o: SupportOverlap) -> "OverlapModel":
        return cls(indices=list(o.indices), cardinality=o.cardinality, feasible=o.feasible)


class RangePropertyModel(BaseModel):
    order: int
    holds: bool
    failing_positive: Optional[List[int]] = None
    failing_negative: Optional[List[int]] = None
    patterns: int
    worst_margin: Optional[float] = None
    worst_margin_infinite: bool = False
    max_duality_residual: float = 0.0

    @classmethod
    def from_certificate(cls, c: RangePropertyCertificate, n: int) -> "RangePropertyModel":
        worst, worst_inf = _finite(c.worst_margin)
        positive, negative = c.failing_pair if c.failing_pair is not None else (None, None)
        return cls(
            order=c.order,
            holds=c.holds,
            failing_positive=list(positive) if positive is not None else None,
            failing_negative=list(negative) if negative is not None else None,
            patterns=pattern_count(n, c.order) if c.order > 0 else 0,
            worst_margin=worst,
            worst_margin_infinite=worst_inf,
            max_duality_residual=c.max_duality_residual,
        )


class CriterionModel(BaseModel):
    name: str
    applicable: bool
    threshold: Optional[float] = None
    threshold_infinite: bool = False
    passed: bool
    provenance: str
    inclusive: bool = False
    diagnostic: Optional[str] = None
    non_strict_passed: Optional[bool] = None

    @classmethod
    def from_criterion(cls, c: Criterion) -> "CriterionModel":
        threshold, infinite = _finite(c.threshold)
        return cls(
            name=c.name, applicable=c.applicable, threshold=threshold, threshold_infinite=infinite,
            passed=c.passed, provenance=c.provenance, inclusive=c.inclusive,
            diagnostic=c.diagnostic, non_strict_passed=c.non_strict_passed,
        )


class VerdictModel(BaseModel):
    candidate: Optional[List[float]] = None
    sparsity: Optional[int] = None
    conclusion: str
    best_level: Optional[float] = None
    best_level_infinite: bool = False
    best_criterion: Optional[str] = None
    criteria: List[CriterionModel]
    diagnostics: List[str] = Field(default_factory=list)

    @classmethod
    def from_verdict(cls, v: UniquenessVerdict) -> "VerdictModel":
        best = strongest_criterion(v.criteria)
        level, level_inf = _finite(best.threshold if best is not None else None)
        return cls(
            candidate=v.candidate.tolist() if v.candidate is not None else None,
            sparsity=v.sparsity,
            conclusion=v.conclusion.value,
            best_level=level,
            best_level_infinite=level_inf,
            best_criterion=best.name if best is not None else None,
            criteria=[CriterionModel.from_criterion(c) for c in v.criteria],
            diagnostics=list(v.diagnostics),
        )


class AnalysisReport(BaseModel):
    """Everything the analyzer computed for one system; sections are optional per subcommand."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schemaVersion")
    command: str
    input: InputDescription
    coherence: Optional[CoherenceModel] = None
    babel: Optional[BabelModel] = None
    spark: Optional[SparkModel] = None
    scalings: List[ScalingModel] = Field(default_factory=list)
    overlap: Optional[OverlapModel] = None
    range_property: Optional[RangePropertyModel] = None
    verdict: Optional[VerdictModel] = None
    timings: Dict[str, float] = Field(default_factory=dict)


def report_from_verdict(command: str, description: InputDescription, verdict: UniquenessVerdict,
                        timings: Optional[Dict[str, float]] = None) -> AnalysisReport:
    """Assemble the full report from an evaluate() result."""
    r = verdict.report
    return AnalysisReport(
        command=command,
        input=description,
        coherence=CoherenceModel.from_summary(r.summary) if r.summary is not None else None,
        babel=BabelModel.from_profile(r.profile) if r.profile is not None else None,
        spark=SparkModel.from_report(r),
        scalings=[ScalingModel.from_certificates(c) for c in verdict.scaled],
        overlap=OverlapModel.from_overlap(verdict.overlap) if verdict.overlap is not None else None,
        range_property=(
            RangePropertyModel.from_certificate(verdict.range_certificate, description.cols)
            if verdict.range_certificate is not None else None
        ),
        verdict=VerdictModel.from_verdict(verdict),
        timings=dict(timings or {}),
    )


def report_to_json(report: AnalysisReport) -> str:
    return json.dumps(report.model_dump(mode="json", by_alias=True), indent=2, ensure_ascii=False)


def report_from_json(text: str) -> AnalysisReport:
    return AnalysisReport.model_validate_json(text)
