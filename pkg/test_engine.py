#!/usr/bin/env python3
"""
End-to-end tests for the verdict engine on the worked examples.
"""

import itertools
import math

import numpy as np
import pytest

from conftest import FIXTURE_TIE_TOL, load_matrix, load_vector
from sparsecert.config import AnalysisConfig
from sparsecert.engine import (
    AnalysisOptions,
    Conclusion,
    SystemInstance,
    best_recoverable_sparsity,
    evaluate,
)
from sparsecert.errors import DimensionMismatchError, InvalidCandidateError, NoApplicableCriterionError
from sparsecert.linalg import DenseMatrix
from sparsecert.overlap import overlap_threshold, overlap_verdict
from sparsecert.scaling import ScalingSpec

COHERENCE_ONLY = AnalysisOptions(want_exact=False, include_babel=False, tie_tol=FIXTURE_TIE_TOL)


def test_support_overlap_certifies_worked_example(ex54):
    instance = SystemInstance(ex54, load_vector("ex54_b.csv", 3), candidate=load_vector("ex54_x.csv", 5))
    verdict = evaluate(instance, AnalysisOptions(tie_tol=FIXTURE_TIE_TOL, include_phi_b=False))

    assert verdict.sparsity == 1
    assert verdict.conclusion is Conclusion.UNIQUE_SPARSEST
    for name in ("exact_spark", "mutual_coherence", "babel", "sub_babel"):
        c = verdict.criterion(name)
        assert c.threshold == pytest.approx(1.0) and not c.passed
    overlap = verdict.criterion("support_overlap")
    assert overlap.threshold == pytest.approx(1.5) and overlap.passed
    assert [c.name for c in verdict.passing] == ["support_overlap"]
    assert not verdict.criterion("coherence_rank").applicable
    assert not verdict.criterion("support_overlap_rank_one").applicable


def test_one_sparse_candidate_on_rank_one_matrix(ex211):
    x = np.array([0.0, 2.0, 0.0, 0.0])
    instance = SystemInstance(ex211, ex211.array @ x, candidate=x)
    verdict = evaluate(instance, AnalysisOptions(tie_tol=FIXTURE_TIE_TOL))
    assert verdict.conclusion is Conclusion.UNIQUE_SPARSEST
    assert verdict.criterion("mutual_coherence").threshold == pytest.approx(1.1258, abs=1e-3)
    assert verdict.criterion("mutual_coherence").passed
    assert verdict.criterion("coherence_rank_one").threshold == pytest.approx(1.2274, abs=1e-3)
    assert verdict.criterion("coherence_rank_one").passed
    assert verdict.criterion("exact_spark").threshold == 2.0


def test_dense_candidate_is_inconclusive(rng):
    A = DenseMatrix.from_array(rng.standard_normal((3, 6)))
    x = rng.uniform(1.0, 2.0, 6)
    verdict = evaluate(SystemInstance(A, A.array @ x, candidate=x))
    assert verdict.sparsity == 6
    assert verdict.conclusion is Conclusion.INCONCLUSIVE
    assert verdict.passing == []


def test_without_candidate_nothing_passes(ex211):
    verdict = evaluate(SystemInstance(ex211, np.zeros(3)))
    assert verdict.sparsity is None
    assert verdict.conclusion is Conclusion.INCONCLUSIVE
    assert verdict.criterion("exact_spark").threshold == 2.0


def test_best_level_with_explicit_scaling(remark23, manifest):
    expected = manifest["ex44_w.csv"]
    W = ScalingSpec.explicit(load_matrix("ex44_w.csv").array, label="W")
    instance = SystemInstance(remark23, remark23.array[:, 0], scalings=(W,))
    options = AnalysisOptions(want_exact=False, include_babel=False, include_phi_b=False,
                              tie_tol=FIXTURE_TIE_TOL)
    level, name = best_recoverable_sparsity(instance, options)
    assert level == pytest.approx(expected["psi_half"], abs=1e-3)
    assert name == "scaled[W]:coherence_rank"

    verdict = evaluate(instance, options)
    assert verdict.criterion("scaled[W]:mutual_coherence").threshold == pytest.approx(
        expected["classic_half"], abs=1e-3)
    for suffix in ("coherence_rank_m1", "coherence_rank_one"):
        assert verdict.criterion(f"scaled[W]:{suffix}").threshold == pytest.approx(level, abs=1e-9)
    assert not verdict.criterion("scaled[W]:coherence_rank_m2").applicable
    assert not verdict.criterion("coherence_rank").applicable


def test_best_level_with_phi_scaling(ex48):
    instance = SystemInstance(ex48, load_vector("ex48_b.csv", 3))
    level, name = best_recoverable_sparsity(instance, COHERENCE_ONLY)
    assert level == pytest.approx(1.1250, abs=1e-3)
    assert name == "phi_b:coherence_rank"

    verdict = evaluate(instance, COHERENCE_ONLY)
    assert verdict.criterion("coherence_rank").threshold == pytest.approx(1.1016, abs=1e-3)
    assert verdict.criterion("phi_b:mutual_coherence").threshold == pytest.approx(1.1217, abs=1e-3)
    assert verdict.criterion("phi_b:coherence_rank_m1").threshold == pytest.approx(1.1250, abs=1e-3)


def test_identity_scaling_keeps_coherence_rank_criteria():
    v = 0.9165
    A = DenseMatrix.from_array(np.column_stack([
        [1.0, 0.0, 0.0, 0.0], [0.4, v, 0.0, 0.0], [0.4, 0.0, v, 0.0], [0.0, 0.0, 0.0, 1.0],
    ]))
    instance = SystemInstance(A, np.zeros(4), scalings=(ScalingSpec.explicit(np.eye(4), label="I"),))
    options = AnalysisOptions(want_exact=False, include_phi_b=False)
    verdict = evaluate(instance, options)

    unscaled = verdict.criterion("coherence_rank")
    scaled = verdict.criterion("scaled[I]:coherence_rank")
    assert unscaled.applicable and scaled.applicable
    assert scaled.threshold == pytest.approx(unscaled.threshold, abs=1e-12)
    assert scaled.threshold == pytest.approx(2.5224, abs=1e-3)
    # alpha = 2 here, so the rank-one form does not apply in either system
    assert not verdict.criterion("scaled[I]:coherence_rank_one").applicable

    level, _ = best_recoverable_sparsity(instance, options)
    assert level >= unscaled.threshold - 1e-12


def test_identity_scaling_keeps_rank_one_criterion(ex211):
    instance = SystemInstance(ex211, np.zeros(3), scalings=(ScalingSpec.explicit(np.eye(3), label="I"),))
    verdict = evaluate(instance, COHERENCE_ONLY)
    for name in ("coherence_rank", "coherence_rank_one"):
        unscaled = verdict.criterion(name)
        scaled = verdict.criterion(f"scaled[I]:{name}")
        assert scaled.applicable
        assert scaled.threshold == pytest.approx(unscaled.threshold, abs=1e-12)
    assert verdict.criterion("scaled[I]:coherence_rank_one").threshold == pytest.approx(1.2274, abs=1e-3)


def _competing_solution(A: np.ndarray, b: np.ndarray, x: np.ndarray, sparsity: int):
    """A solution other than x with at most `sparsity` nonzeros, by support enumeration."""
    n = A.shape[1]
    scale = max(1.0, float(np.linalg.norm(b)))
    for size in range(1, sparsity + 1):
        for support in itertools.combinations(range(n), size):
            columns = A[:, support]
            coefficients, *_ = np.linalg.lstsq(columns, b, rcond=None)
            if np.linalg.norm(columns @ coefficients - b) > 1e-9 * scale:
                continue
            z = np.zeros(n)
            z[list(support)] = coefficients
            if np.linalg.norm(z - x) > 1e-7 * max(1.0, float(np.linalg.norm(x))):
                return z
            if np.linalg.matrix_rank(columns) < size:
                return z  # a null direction on this support gives other solutions
    return None


def test_certified_candidates_are_unique_sparsest():
    generator = np.random.default_rng(8808)
    certified = 0
    violations = []
    for trial in range(100):
        A = generator.standard_normal((4, 8))
        x = np.zeros(8)
        support = generator.choice(8, size=1 + trial % 2, replace=False)
        x[support] = generator.choice([-1.0, 1.0], support.size) * generator.uniform(0.5, 2.0, support.size)
        b = A @ x
        verdict = evaluate(SystemInstance(DenseMatrix.from_array(A), b, candidate=x))
        if verdict.conclusion is not Conclusion.UNIQUE_SPARSEST:
            continue
        certified += 1
        other = _competing_solution(A, b, x, verdict.sparsity)
        if other is not None:
            violations.append((trial, [c.name for c in verdict.passing]))
    print(f"🧪 {certified} of 100 planted solutions certified")
    assert certified > 0
    assert violations == []


def test_overlap_criterion_matches_module_verdict(ex54):
    b = load_vector("ex54_b.csv", 3)
    x = load_vector("ex54_x.csv", 5)
    verdict = evaluate(SystemInstance(ex54, b, candidate=x), AnalysisOptions(include_phi_b=False))
    c = verdict.criterion("support_overlap")
    assert c.threshold == overlap_threshold(verdict.overlap, verdict.report.exact)
    assert c.passed == overlap_verdict(x, verdict.report.exact, verdict.overlap)


def test_independent_columns_use_exact_path():
    A = DenseMatrix.identity(3)
    level, name = best_recoverable_sparsity(SystemInstance(A, [1.0, 2.0, 0.0]))
    assert math.isinf(level)
    assert name == "exact_spark"


def test_nothing_applicable():
    # a zero column leaves no coherence statistics and b is outside the range
    A = DenseMatrix.from_rows([[1.0, 0.0], [0.0, 0.0]])
    options = AnalysisOptions(want_exact=False, include_babel=False, include_phi_b=False)
    with pytest.raises(NoApplicableCriterionError):
        best_recoverable_sparsity(SystemInstance(A, [0.0, 1.0]), options)


def test_searched_scaling_reports_non_strict_reading(ex48):
    x = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    instance = SystemInstance(ex48, ex48.array @ x, candidate=x)
    options = AnalysisOptions(want_exact=False, include_phi_b=False, search_trials=3, seed=5)
    c = evaluate(instance, options).criterion("search:mutual_coherence")
    assert c.applicable and c.non_strict_passed is True


def test_order_k_criteria(ex211):
    x = np.array([1.0, 0.0, 0.0, 0.0])
    instance = SystemInstance(ex211, ex211.array @ x, candidate=x)
    verdict = evaluate(instance, AnalysisOptions(range_property_k=2, include_phi_b=False))
    nsc = verdict.criterion("null_space_constant")
    assert nsc.inclusive and nsc.threshold == 1.0 and nsc.passed
    assert verdict.range_certificate is not None
    assert verdict.criterion("range_property").inclusive


def test_instance_validation(ex54):
    with pytest.raises(DimensionMismatchError):
        SystemInstance(ex54, np.zeros(4))
    with pytest.raises(InvalidCandidateError):
        SystemInstance(ex54, np.zeros(3), candidate=np.ones(5))
    with pytest.raises(DimensionMismatchError):
        SystemInstance(ex54, np.zeros(3), candidate=np.zeros(4))


def test_options_from_environment(monkeypatch):
    monkeypatch.setenv("SPARSECERT_TIE_TOL", "5e-4")
    monkeypatch.setenv("SPARSECERT_SEARCH_TRIALS", "4")
    options = AnalysisOptions.from_config(AnalysisConfig(), seed=9)
    assert options.tie_tol == 5e-4
    assert options.search_trials == 4
    assert options.seed == 9


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
