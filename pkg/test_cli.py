#!/usr/bin/env python3
"""
Tests for the sparsecert command-line interface.
"""

import json

import numpy as np
import pytest

from conftest import load_matrix
from sparsecert.cli import EXIT_INCONCLUSIVE, EXIT_INPUT_ERROR, EXIT_OK, run_command


def _json_run(capsys, argv):
    code = run_command(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_analyze_worked_example(capsys, fixture_path):
    code, doc = _json_run(capsys, ["analyze", "--matrix", fixture_path("remark23.csv"), "--tie-tol", "5e-4"])
    assert code == EXIT_OK
    assert doc["command"] == "analyze"
    assert doc["coherence"]["mu"] == pytest.approx(0.9239, abs=1e-3)
    assert doc["coherence"]["alpha"] == 2
    assert doc["input"]["rows"] == 3 and doc["input"]["cols"] == 6


def test_verify_certifies_worked_example(capsys, fixture_path):
    code, doc = _json_run(capsys, [
        "verify", "--matrix", fixture_path("ex54.csv"), "--rhs", fixture_path("ex54_b.csv"),
        "--x", fixture_path("ex54_x.csv"),
    ])
    assert code == EXIT_OK
    assert doc["verdict"]["conclusion"] == "UniqueSparsest"
    passing = [c["name"] for c in doc["verdict"]["criteria"] if c["passed"]]
    assert passing == ["support_overlap"]


def test_verify_human_output(capsys, fixture_path):
    code = run_command([
        "verify", "--matrix", fixture_path("ex54.csv"), "--rhs", fixture_path("ex54_b.csv"),
        "--x", fixture_path("ex54_x.csv"),
    ])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "✅ Unique sparsest solution" in out
    assert "1.5000" in out


def test_verify_dense_candidate_is_inconclusive(tmp_path, capsys, fixture_path):
    A = load_matrix("ex211.csv")
    x = np.ones(4)
    (tmp_path / "x.csv").write_text("\n".join(str(v) for v in x))
    (tmp_path / "b.csv").write_text("\n".join(repr(float(v)) for v in A.array @ x))
    code = run_command([
        "verify", "--matrix", fixture_path("ex211.csv"), "--rhs", str(tmp_path / "b.csv"),
        "--x", str(tmp_path / "x.csv"),
    ])
    assert code == EXIT_INCONCLUSIVE
    assert "Inconclusive" in capsys.readouterr().out


def test_spark_and_bounds(capsys, fixture_path):
    code, doc = _json_run(capsys, ["spark", "--matrix", fixture_path("ex211.csv"), "--tie-tol", "5e-4"])
    assert code == EXIT_OK
    assert doc["spark"]["exact"] == 4
    assert doc["verdict"] is None

    code, doc = _json_run(capsys, ["bounds", "--matrix", fixture_path("ex211.csv"), "--tie-tol", "5e-4"])
    assert code == EXIT_OK
    assert doc["spark"]["exact"] is None
    assert doc["spark"]["psi_bound"] / 2 == pytest.approx(1.2274, abs=1e-3)


def test_scale_with_phi_b(capsys, fixture_path):
    code, doc = _json_run(capsys, [
        "scale", "--matrix", fixture_path("ex48.csv"), "--rhs", fixture_path("ex48_b.csv"),
        "--phi-b", "--no-exact", "--tie-tol", "5e-4",
    ])
    assert code == EXIT_OK
    [scaling] = doc["scalings"]
    assert scaling["label"] == "phi_b"
    assert scaling["spark"]["psi_case1"] / 2 == pytest.approx(1.1250, abs=1e-3)


def test_scale_needs_a_scaling(capsys, fixture_path):
    assert run_command(["scale", "--matrix", fixture_path("ex48.csv")]) == EXIT_INPUT_ERROR
    assert "no scaling requested" in capsys.readouterr().err


def test_overlap_and_rangeprop(capsys, fixture_path):
    code, doc = _json_run(capsys, [
        "overlap", "--matrix", fixture_path("ex54.csv"), "--rhs", fixture_path("ex54_b.csv"),
    ])
    assert code == EXIT_OK
    assert doc["overlap"]["indices"] == [2]

    code, doc = _json_run(capsys, ["rangeprop", "--matrix", fixture_path("ex211.csv"), "--k", "1"])
    assert code == EXIT_OK
    assert doc["range_property"]["order"] == 1
    assert doc["range_property"]["patterns"] == 8


def test_input_errors(capsys, fixture_path, tmp_path):
    assert run_command(["spark", "--matrix", "missing.csv"]) == EXIT_INPUT_ERROR
    assert "file not found" in capsys.readouterr().err

    assert run_command(["overlap", "--matrix", fixture_path("ex54.csv")]) == EXIT_INPUT_ERROR
    assert run_command([]) == EXIT_INPUT_ERROR
    assert run_command(["rangeprop", "--matrix", fixture_path("ex54.csv")]) == EXIT_INPUT_ERROR

    wrong = tmp_path / "x.csv"
    wrong.write_text("1\n1\n1\n1\n1\n")
    assert run_command([
        "verify", "--matrix", fixture_path("ex54.csv"), "--rhs", fixture_path("ex54_b.csv"), "--x", str(wrong),
    ]) == EXIT_INPUT_ERROR


def test_help_exits_cleanly(capsys):
    assert run_command(["--help"]) == EXIT_OK
    assert "analyze" in capsys.readouterr().out


if __name__ == "__main__":
    print("🧪 Running CLI tests...")
    raise SystemExit(pytest.main([__file__, "-v"]))
