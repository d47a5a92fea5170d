#!/usr/bin/env python3
"""
Tests for the JSON analysis report.
"""

import json

import numpy as np
import pytest

from conftest import FIXTURE_TIE_TOL, load_vector
from sparsecert.engine import AnalysisOptions, SystemInstance, evaluate
from sparsecert.linalg import DenseMatrix
from sparsecert.report_models import (
    SCHEMA_VERSION,
    AnalysisReport,
    InputDescription,
    report_from_json,
    report_from_verdict,
    report_to_json,
)


def _description(A: DenseMatrix) -> InputDescription:
    return InputDescription(matrix_path="A.csv", rows=A.rows, cols=A.cols, tie_tolerance=FIXTURE_TIE_TOL)


def test_report_of_worked_example(ex54):
    instance = SystemInstance(ex54, load_vector("ex54_b.csv", 3), candidate=load_vector("ex54_x.csv", 5))
    verdict = evaluate(instance, AnalysisOptions(tie_tol=FIXTURE_TIE_TOL, include_phi_b=False))
    report = report_from_verdict("verify", _description(ex54), verdict, {"evaluate": 0.01})

    doc = json.loads(report_to_json(report))
    assert doc["schemaVersion"] == SCHEMA_VERSION
    assert doc["spark"]["exact"] == 2
    assert doc["spark"]["witness"] == [3, 4]
    assert doc["overlap"]["indices"] == [2]
    assert doc["verdict"]["conclusion"] == "UniqueSparsest"
    assert doc["verdict"]["sparsity"] == 1
    assert doc["coherence"]["membership"] == "NotInM"
    names = [c["name"] for c in doc["verdict"]["criteria"]]
    assert "support_overlap" in names


def test_infinite_values_become_null_with_flag():
    A = DenseMatrix.identity(3)
    verdict = evaluate(SystemInstance(A, np.array([1.0, 0.0, 0.0])), AnalysisOptions(include_phi_b=False))
    doc = json.loads(report_to_json(report_from_verdict("analyze", _description(A), verdict)))
    assert doc["spark"]["exact"] is None and doc["spark"]["exact_infinite"] is True
    exact = next(c for c in doc["verdict"]["criteria"] if c["name"] == "exact_spark")
    assert exact["threshold"] is None and exact["threshold_infinite"] is True
    assert doc["verdict"]["best_level_infinite"] is True


def test_round_trip_is_byte_stable(ex211):
    x = np.array([0.0, 1.0, 0.0, 0.0])
    verdict = evaluate(SystemInstance(ex211, ex211.array @ x, candidate=x),
                       AnalysisOptions(tie_tol=FIXTURE_TIE_TOL, include_svd=True))
    text = report_to_json(report_from_verdict("analyze", _description(ex211), verdict))
    parsed = report_from_json(text)
    assert isinstance(parsed, AnalysisReport)
    assert report_to_json(parsed) == text
    assert [s.label for s in parsed.scalings] == ["phi_b", "svd"]


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
