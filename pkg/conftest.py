"""
Shared pytest fixtures: the worked examples under fixtures/ and seeded
random matrices.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from sparsecert.config import ToleranceConfig
from sparsecert.linalg import DenseMatrix
from sparsecert.spark import spark_report
from sparsecert.utils import parse_matrix, parse_vector

FIXTURES = Path(__file__).parent / "fixtures"

# the worked examples print four decimals
FIXTURE_TIE_TOL = ToleranceConfig.PRINTED_FIXTURE_TIE_TOL


def load_matrix(name: str) -> DenseMatrix:
    return parse_matrix(str(FIXTURES / name))


def load_vector(name: str, length=None) -> np.ndarray:
    return parse_vector(str(FIXTURES / name), length=length)


@pytest.fixture(scope="session")
def manifest():
    return json.loads((FIXTURES / "manifest.json").read_text(encoding="utf-8"))


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / name)


@pytest.fixture
def remark23():
    return load_matrix("remark23.csv")


@pytest.fixture
def ex211():
    return load_matrix("ex211.csv")


@pytest.fixture
def ex45():
    return load_matrix("ex45.csv")


@pytest.fixture
def ex48():
    return load_matrix("ex48.csv")


@pytest.fixture
def ex54():
    return load_matrix("ex54.csv")


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


def gaussian(rng, rows: int, cols: int) -> DenseMatrix:
    return DenseMatrix.from_array(rng.standard_normal((rows, cols)))


# shapes of the seeded property corpus, 3x6 through 5x10
PROPERTY_SHAPES = [(m, n) for m in (3, 4, 5) for n in range(6, 11) if n >= 2 * m]
PROPERTY_COUNT = 200


@pytest.fixture(scope="session")
def property_corpus():
    """(A, full spark report of A) for 200 seeded Gaussian matrices."""
    generator = np.random.default_rng(7301)
    corpus = []
    for index in range(PROPERTY_COUNT):
        A = gaussian(generator, *PROPERTY_SHAPES[index % len(PROPERTY_SHAPES)])
        corpus.append((A, spark_report(A)))
    return corpus
