#!/usr/bin/env python3
"""
Tests for the coherence statistics and class membership.
"""

import numpy as np
import pytest

from conftest import FIXTURE_TIE_TOL, gaussian
from sparsecert.coherence import (
    ClassMembership,
    CoherenceSummary,
    class_membership,
    coherence_summary,
    coherence_summary_of,
    membership_flags,
    mutual_coherence,
)
from sparsecert.errors import DegenerateCoherenceError, NotApplicableError
from sparsecert.linalg import DenseMatrix, gram


def _summary(mu, mu2, alpha, beta):
    return CoherenceSummary(mu, mu2, alpha, beta, (alpha, beta), 1e-9)


@pytest.mark.parametrize("name, mu, mu2, alpha, beta", [
    ("remark23", 0.9239, 0.7644, 2, 1),
    ("ex211", 0.7989, 0.4422, 1, 1),
    ("ex48", 0.8581, 0.6984, 1, 1),
])
def test_summaries_of_worked_examples(request, name, mu, mu2, alpha, beta):
    s = coherence_summary_of(request.getfixturevalue(name), FIXTURE_TIE_TOL)
    assert s.mu == pytest.approx(mu, abs=FIXTURE_TIE_TOL)
    assert s.mu2 == pytest.approx(mu2, abs=FIXTURE_TIE_TOL)
    assert (s.alpha, s.beta) == (alpha, beta)


def test_two_identical_columns_are_degenerate():
    A = DenseMatrix.from_rows([[1, 1], [2, 2]])
    with pytest.raises(DegenerateCoherenceError) as info:
        coherence_summary_of(A)
    assert info.value.mu == 1.0
    s = coherence_summary_of(A, allow_degenerate=True)
    assert s.mu == 1.0 and s.mu2 is None and s.degenerate


def test_parallel_columns_snap_to_one(ex54):
    s = coherence_summary_of(ex54)
    assert s.mu == 1.0
    assert (s.alpha, s.beta) == (1, 1)


def test_orthogonal_columns_are_unbounded():
    s = coherence_summary_of(DenseMatrix.identity(3))
    assert s.unbounded and s.mu == 0.0
    with pytest.raises(NotApplicableError):
        class_membership(s)


def test_gram_must_be_normalized():
    with pytest.raises(ValueError):
        coherence_summary(gram(DenseMatrix.identity(2)))


def test_membership():
    assert class_membership(_summary(0.7989, 0.4422, 1, 1)) is ClassMembership.M1
    assert class_membership(_summary(0.9239, 0.7644, 2, 1)) is ClassMembership.NOT_IN_M
    assert class_membership(_summary(1.0, 0.5, 1, 1)) is ClassMembership.NOT_IN_M
    # alpha * mu = 1 exactly with beta < alpha
    assert class_membership(_summary(0.5, 0.25, 2, 1)) is ClassMembership.M2
    assert membership_flags(_summary(0.4, 0.2, 2, 1)) == (True, True)


def test_summary_invariances(rng):
    for _ in range(10):
        A = gaussian(rng, 4, 7)
        base = coherence_summary_of(A)
        perm = rng.permutation(7)
        signs = np.where(rng.random(7) < 0.5, -1.0, 1.0)
        scales = rng.uniform(0.5, 3.0, 7)
        for variant in (A.array[:, perm], A.array * signs, A.array * scales):
            s = coherence_summary_of(DenseMatrix.from_array(variant))
            assert s.mu == pytest.approx(base.mu, abs=1e-12)
            assert s.mu2 == pytest.approx(base.mu2, abs=1e-12)
            assert (s.alpha, s.beta) == (base.alpha, base.beta)
        assert base.beta >= 1
        assert mutual_coherence(A) == pytest.approx(base.mu, abs=1e-12)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
