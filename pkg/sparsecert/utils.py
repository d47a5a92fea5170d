"""
Matrix and vector file readers for the CLI.

CSV: one matrix row per line, comma-separated decimal literals; blank lines
and lines starting with '#' are skipped.
JSON: {"rows": m, "cols": n, "data": [row-major values]} for matrices, a bare
array or {"data": [...]} for vectors.
"""

import json
import logging
import math
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .errors import DimensionError, ParseError
from .linalg import DenseMatrix

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")


def detect_format(path: str, fmt: Optional[str] = None) -> str:
    """Explicit format wins; otherwise the extension decides, defaulting to CSV."""
    if fmt:
        fmt = fmt.lower()
        if fmt not in FORMATS:
            raise ValueError(f"Unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
        return fmt
    return "json" if Path(path).suffix.lower() == ".json" else "csv"


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError(path, 0, 0, "file not found")
    except OSError as e:
        raise ParseError(path, 0, 0, f"cannot read file: {e.strerror or e}")


def _parse_number(token: str, path: str, line: int, column: int) -> float:
    text = token.strip()
    if not text:
        raise ParseError(path, line, column, "empty field")
    try:
        value = float(text)
    except ValueError:
        raise ParseError(path, line, column, f"not a decimal literal: {text!r}")
    if not math.isfinite(value):
        raise ParseError(path, line, column, f"non-finite value: {text!r}")
    return value


def _csv_rows(text: str, path: str) -> List[Tuple[int, List[float]]]:
    """(line number, values) for every data line."""
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        values = []
        column = 1
        for field in raw.split(","):
            values.append(_parse_number(field, path, line_no, column))
            column += len(field) + 1
        rows.append((line_no, values))
    return rows


def _json_load(text: str, path: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(path, e.lineno, e.colno, e.msg)


def _json_numbers(values, path: str) -> List[float]:
    if not isinstance(values, list):
        raise ParseError(path, 1, 1, "'data' must be an array of numbers")
    out = []
    for index, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ParseError(path, 1, 1, f"data[{index}] is not a finite number: {v!r}")
        out.append(float(v))
    return out


def parse_matrix(path: str, fmt: Optional[str] = None) -> DenseMatrix:
    """
    Read a matrix file.

    Raises:
        ParseError: unreadable file, bad literal, ragged CSV row (with line and column)
        DimensionError: JSON rows * cols disagrees with the data length
    """
    fmt = detect_format(path, fmt)
    text = _read_text(path)

    if fmt == "csv":
        rows = _csv_rows(text, path)
        if not rows:
            raise ParseError(path, 1, 1, "no data rows")
        width = len(rows[0][1])
        for line_no, values in rows[1:]:
            if len(values) != width:
                raise ParseError(path, line_no, 1, f"ragged row: expected {width} values, found {len(values)}")
        matrix = DenseMatrix.from_rows([values for _, values in rows])
    else:
        doc = _json_load(text, path)
        if not isinstance(doc, dict) or not {"rows", "cols", "data"} <= set(doc):
            raise ParseError(path, 1, 1, "expected an object with fields rows, cols, data")
        m, n = doc["rows"], doc["cols"]
        if not (isinstance(m, int) and isinstance(n, int)) or m < 1 or n < 1:
            raise DimensionError(f"{path}: rows and cols must be positive integers, got {m!r} x {n!r}")
        data = doc["data"]
        if data and isinstance(data[0], list):
            data = [v for row in data for v in row]
        values = _json_numbers(data, path)
        if len(values) != m * n:
            raise DimensionError(f"{path}: {m} x {n} matrix needs {m * n} values, got {len(values)}")
        matrix = DenseMatrix(m, n, np.array(values))

    logger.debug("read %dx%d matrix from %s", matrix.rows, matrix.cols, path)
    return matrix


def parse_vector(path: str, fmt: Optional[str] = None, length: Optional[int] = None) -> np.ndarray:
    """
    Read a vector: one value per CSV line, a single comma-separated line, or a JSON array.

    Raises:
        ParseError: as parse_matrix
        DimensionError: the CSV is a genuine matrix, or the length differs from `length`
    """
    fmt = detect_format(path, fmt)
    text = _read_text(path)

    if fmt == "csv":
        rows = _csv_rows(text, path)
        if not rows:
            raise ParseError(path, 1, 1, "no data rows")
        if len(rows) == 1:
            values = rows[0][1]
        else:
            for line_no, row in rows:
                if len(row) != 1:
                    raise DimensionError(f"{path}:{line_no}: a vector file needs one value per line")
            values = [row[0] for _, row in rows]
    else:
        doc = _json_load(text, path)
        if isinstance(doc, dict):
            doc = doc.get("data")
        values = _json_numbers(doc, path)

    vector = np.array(values, dtype=float)
    if length is not None and vector.size != length:
        raise DimensionError(f"{path}: expected a vector of length {length}, got {vector.size}")
    return vector
