"""
Sparsecert Package

Certificates for the uniqueness of the sparsest solution of an underdetermined
linear system Ax = b: exact spark, coherence and Babel bounds, scaled
coherence, support overlap and range-property checks, plus a verdict engine
that combines them.
"""

__version__ = "0.1.0"

from .config import AnalysisConfig, ToleranceConfig, configure_logging
from .errors import SparseCertError
from .linalg import DenseMatrix, GramMatrix, normalized_gram, svd
from .coherence import CoherenceSummary, class_membership, coherence_summary
from .babel import BabelProfile, babel_profile
from .spark import SparkReport, exact_spark, spark_report
from .scaling import ScalingSpec, phi_diagonal_from_b, scaled_certificates, search_scaling, svd_scaling
from .overlap import SupportOverlap, support_overlap
from .rangeprop import RangePropertyCertificate, range_property_ii
from .engine import (
    AnalysisOptions,
    Conclusion,
    SystemInstance,
    UniquenessVerdict,
    best_recoverable_sparsity,
    evaluate,
)

__all__ = [
    "AnalysisConfig",
    "AnalysisOptions",
    "BabelProfile",
    "CoherenceSummary",
    "Conclusion",
    "DenseMatrix",
    "GramMatrix",
    "RangePropertyCertificate",
    "ScalingSpec",
    "SparkReport",
    "SparseCertError",
    "SupportOverlap",
    "SystemInstance",
    "ToleranceConfig",
    "UniquenessVerdict",
    "babel_profile",
    "best_recoverable_sparsity",
    "class_membership",
    "coherence_summary",
    "configure_logging",
    "evaluate",
    "exact_spark",
    "normalized_gram",
    "phi_diagonal_from_b",
    "range_property_ii",
    "scaled_certificates",
    "search_scaling",
    "spark_report",
    "support_overlap",
    "svd",
    "svd_scaling",
]
