#!/usr/bin/env python3
"""
Tests for the matrix and vector file readers.
"""

import json

import numpy as np
import pytest

from sparsecert.errors import DimensionError, ParseError
from sparsecert.utils import detect_format, parse_matrix, parse_vector


def test_csv_identity(tmp_path):
    path = tmp_path / "eye.csv"
    path.write_text("1,0\n0,1\n")
    A = parse_matrix(str(path))
    assert np.array_equal(A.array, np.eye(2))


def test_worked_example_fixture(fixture_path):
    A = parse_matrix(fixture_path("remark23.csv"))
    assert A.shape == (3, 6)
    assert A.array[0, 3] == 0.9239


def test_ragged_csv_reports_line(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("# header\n1,2,3\n4,5\n")
    with pytest.raises(ParseError) as info:
        parse_matrix(str(path))
    assert info.value.line == 3


def test_bad_literal_reports_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,abc\n")
    with pytest.raises(ParseError) as info:
        parse_matrix(str(path))
    assert (info.value.line, info.value.column) == (1, 3)


def test_missing_file():
    with pytest.raises(ParseError):
        parse_matrix("does/not/exist.csv")


def test_json_matrix(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"rows": 2, "cols": 3, "data": [1, 2, 3, 4, 5, 6]}))
    A = parse_matrix(str(path))
    assert A.array[1, 0] == 4.0

    path.write_text(json.dumps({"rows": 2, "cols": 3, "data": [1, 2, 3]}))
    with pytest.raises(DimensionError):
        parse_matrix(str(path))


def test_vectors(tmp_path, fixture_path):
    assert parse_vector(fixture_path("ex54_b.csv"), length=3).tolist() == [-2.0, -0.5, -0.5]
    row = tmp_path / "row.csv"
    row.write_text("1,2,3\n")
    assert parse_vector(str(row)).tolist() == [1.0, 2.0, 3.0]
    with pytest.raises(DimensionError):
        parse_vector(str(row), length=4)
    js = tmp_path / "v.json"
    js.write_text("[0.5, 1]")
    assert parse_vector(str(js)).tolist() == [0.5, 1.0]


def test_detect_format():
    assert detect_format("a.JSON") == "json"
    assert detect_format("a.txt") == "csv"
    assert detect_format("a.csv", "json") == "json"
    with pytest.raises(ValueError):
        detect_format("a.csv", "xml")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
