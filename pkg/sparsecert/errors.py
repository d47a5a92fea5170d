"""
Exception hierarchy for the sparsecert package.

Every failure the analyzer can report is a subclass of SparseCertError so the
CLI can map the whole family to a single exit code, while aggregators (spark
report, verdict engine) catch them one by one and turn them into diagnostics.
"""

from typing import Optional, Sequence


class SparseCertError(Exception):
    """Base class for all analyzer errors."""


class ZeroColumnError(SparseCertError):
    """A column with zero l2-norm makes the coherence statistics undefined."""

    def __init__(self, column: int):
        self.column = column
        super().__init__(f"Column {column} has zero l2-norm; coherence is undefined")


class DegenerateCoherenceError(SparseCertError):
    """Every off-diagonal absolute Gram entry ties with the mutual coherence."""

    def __init__(self, mu: float, message: Optional[str] = None):
        self.mu = mu
        super().__init__(
            message or f"All off-diagonal entries tie with mu={mu:.6g}; sub-mutual coherence undefined"
        )


class NotApplicableError(SparseCertError):
    """A bound's preconditions do not hold for this matrix."""


class NoConvergenceError(SparseCertError):
    """The Jacobi SVD did not reach orthogonality within its sweep budget."""

    def __init__(self, sweeps: int):
        self.sweeps = sweeps
        super().__init__(f"Jacobi SVD did not converge within {sweeps} sweeps")


class BudgetExhaustedError(SparseCertError):
    """
    A combinatorial search hit its limit.

    size_reached is the largest subset size that was fully enumerated, so the
    partial result is the certified statement "spark > size_reached".
    """

    def __init__(self, size_reached: int, tests_used: int, message: Optional[str] = None):
        self.size_reached = size_reached
        self.tests_used = tests_used
        super().__init__(
            message
            or f"Search budget exhausted after {tests_used} tests; certified spark > {size_reached}"
        )


class SingularScalingError(SparseCertError):
    """The scaling matrix W is not invertible."""


class RankDeficientError(SparseCertError):
    """The matrix does not have full row rank."""

    def __init__(self, rank: int, rows: int):
        self.rank = rank
        self.rows = rows
        super().__init__(f"Matrix has rank {rank} < {rows} rows")


class DimensionMismatchError(SparseCertError):
    """Operands have incompatible shapes."""


class InfeasibleError(SparseCertError):
    """The linear system Ax = b has no solution."""


class MissingThresholdError(SparseCertError):
    """A Babel threshold needed by the caller does not exist."""


class CycleDetectedError(SparseCertError):
    """The simplex iteration limit was hit."""


class NumericalBreakdownError(SparseCertError):
    """A simplex pivot fell below the safe magnitude."""

    def __init__(self, pivot: float):
        self.pivot = pivot
        super().__init__(f"Pivot magnitude {abs(pivot):.3e} below breakdown threshold")


class InvalidLpError(SparseCertError):
    """Linear program data is inconsistent or too large."""


class NoApplicableCriterionError(SparseCertError):
    """No uniqueness criterion could be evaluated for the instance."""

    def __init__(self, diagnostics: Sequence[str] = ()):
        self.diagnostics = list(diagnostics)
        super().__init__("No applicable uniqueness criterion")


class InvalidCandidateError(SparseCertError):
    """The candidate vector does not solve Ax = b within tolerance."""

    def __init__(self, residual: float, tolerance: float):
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"Candidate residual {residual:.3e} exceeds tolerance {tolerance:.3e}"
        )


class ParseError(SparseCertError):
    """A matrix or vector file could not be parsed."""

    def __init__(self, path: str, line: int, column: int, detail: str):
        self.path = path
        self.line = line
        self.column = column
        self.detail = detail
        super().__init__(f"{path}:{line}:{column}: {detail}")


class DimensionError(SparseCertError):
    """Parsed data has the wrong shape."""
