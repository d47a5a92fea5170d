"""
Dense real matrices and the numerical kernels the rest of the analyzer uses.

All values are immutable: constructors copy their input and mark the numpy
buffer read-only, and every operation returns a fresh object.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .config import ToleranceConfig
from .errors import DimensionMismatchError, NoConvergenceError, ZeroColumnError

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """
    Real m x n matrix stored row-major.

    The underdetermined shape m < n is not enforced here; bounds that need
    it validate it themselves.
    """

    rows: int
    cols: int
    entries: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.entries, dtype=float)
        if self.rows < 1 or self.cols < 1:
            raise DimensionMismatchError(f"Matrix dimensions must be positive, got {self.rows}x{self.cols}")
        if data.size != self.rows * self.cols:
            raise DimensionMismatchError(
                f"Expected {self.rows * self.cols} entries for a {self.rows}x{self.cols} matrix, got {data.size}"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("Matrix entries must be finite (no NaN/Inf)")
        object.__setattr__(self, "entries", _frozen(data.reshape(self.rows, self.cols)))

    @classmethod
    def from_array(cls, array) -> "DenseMatrix":
        data = np.asarray(array, dtype=float)
        if data.ndim == 1:
            data = data.reshape(-1, 1)
        if data.ndim != 2:
            raise DimensionMismatchError(f"Expected a 2-D array, got {data.ndim} dimensions")
        return cls(data.shape[0], data.shape[1], data)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "DenseMatrix":
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise DimensionMismatchError(f"Ragged rows: widths {sorted(widths)}")
        return cls.from_array(np.array(rows, dtype=float))

    @classmethod
    def identity(cls, size: int) -> "DenseMatrix":
        return cls.from_array(np.eye(size))

    @property
    def array(self) -> np.ndarray:
        """Read-only m x n view of the entries."""
        return self.entries

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def column(self, index: int) -> np.ndarray:
        return self.entries[:, index].copy()

    def select_columns(self, indices: Iterable[int]) -> np.ndarray:
        return self.entries[:, list(indices)].copy()

    def delete_column(self, index: int) -> np.ndarray:
        """Plain array of the remaining columns (may have zero columns)."""
        return np.delete(self.entries, index, axis=1)

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix.from_array(self.entries.T)

    def left_multiply(self, W: np.ndarray) -> "DenseMatrix":
        W = np.asarray(W, dtype=float)
        if W.ndim != 2 or W.shape[1] != self.rows:
            raise DimensionMismatchError(f"Cannot multiply {W.shape} by {self.rows}x{self.cols}")
        return DenseMatrix.from_array(W @ self.entries)


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Symmetric n x n Gram matrix, optionally of a column-normalized source."""

    dim: int
    entries: np.ndarray
    source_normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    def abs_off_diagonal(self) -> np.ndarray:
        """|G| with the diagonal zeroed."""
        values = np.abs(self.entries).copy()
        np.fill_diagonal(values, 0.0)
        return values

    def submatrix(self, indices: Sequence[int]) -> np.ndarray:
        idx = list(indices)
        return self.entries[np.ix_(idx, idx)].copy()


@dataclass(frozen=True, eq=False)
class SvdFactors:
    """A = U diag(singular_values) Vt with full orthogonal U (m x m) and Vt (n x n)."""

    U: np.ndarray
    singular_values: np.ndarray
    Vt: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "U", _frozen(self.U))
        object.__setattr__(self, "singular_values", _frozen(self.singular_values))
        object.__setattr__(self, "Vt", _frozen(self.Vt))

    def reconstruct(self) -> np.ndarray:
        m, n = self.U.shape[0], self.Vt.shape[0]
        sigma = np.zeros((m, n))
        k = len(self.singular_values)
        sigma[:k, :k] = np.diag(self.singular_values)
        return self.U @ sigma @ self.Vt


def normalize_columns(A: DenseMatrix) -> Tuple[DenseMatrix, np.ndarray]:
    """
    Scale every column of A to unit l2-norm.

    Args:
        A: input matrix (left unchanged)

    Returns:
        (normalized matrix, scale factors 1/||a_i||)

    Raises:
        ZeroColumnError: if some column is identically zero
    """
    norms = np.linalg.norm(A.array, axis=0)
    for i, value in enumerate(norms):
        if value == 0.0:
            raise ZeroColumnError(i)
    factors = 1.0 / norms
    return DenseMatrix.from_array(A.array * factors), factors


def gram(A: DenseMatrix, source_normalized: bool = False) -> GramMatrix:
    """
    G = A^T A with symmetry enforced by mirroring the upper triangle.

    When source_normalized is set the diagonal is stored as exactly 1.
    """
    product = A.array.T @ A.array
    upper = np.triu(product)
    G = upper + np.triu(product, 1).T
    if source_normalized:
        np.fill_diagonal(G, 1.0)
    return GramMatrix(A.cols, G, source_normalized)


def normalized_gram(A: DenseMatrix) -> GramMatrix:
    """Gram matrix of the column-normalized A."""
    normalized, _ = normalize_columns(A)
    return gram(normalized, source_normalized=True)


def _complete_orthonormal(basis: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns to a full dim x dim orthogonal matrix."""
    columns = [basis[:, j] for j in range(basis.shape[1])]
    identity = np.eye(dim)
    for k in range(dim):
        if len(columns) == dim:
            break
        v = identity[:, k].copy()
        # two passes of Gram-Schmidt keep the completion orthogonal to 1e-15
        for _ in range(2):
            for c in columns:
                v -= np.dot(c, v) * c
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            columns.append(v / norm)
    if not columns:
        return np.zeros((dim, 0))
    return np.column_stack(columns)


def _jacobi_sweeps(work: np.ndarray, accumulate: bool, max_sweeps: int) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    One-sided (Hestenes) Jacobi: rotate column pairs of `work` until all are
    mutually orthogonal. Returns the rotated columns and, if requested, the
    accumulated right rotation V with work_in @ V = work_out.
    """
    p, q = work.shape
    V = np.eye(q) if accumulate else None
    off_tol = 10.0 * max(p, 1) * ToleranceConfig.MACHINE_EPSILON
    for sweep in range(max_sweeps):
        rotated = False
        for i in range(q - 1):
            for j in range(i + 1, q):
                wi = work[:, i]
                wj = work[:, j]
                alpha = float(np.dot(wi, wi))
                beta = float(np.dot(wj, wj))
                gamma = float(np.dot(wi, wj))
                if gamma == 0.0 or abs(gamma) <= off_tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                new_i = c * wi - s * wj
                new_j = s * wi + c * wj
                work[:, i] = new_i
                work[:, j] = new_j
                if V is not None:
                    vi = V[:, i].copy()
                    vj = V[:, j].copy()
                    V[:, i] = c * vi - s * vj
                    V[:, j] = s * vi + c * vj
        if not rotated:
            logger.debug("Jacobi converged after %d sweeps", sweep + 1)
            return work, V
    raise NoConvergenceError(max_sweeps)


def svd(A: DenseMatrix) -> SvdFactors:
    """
    Full singular value decomposition by cyclic one-sided Jacobi.

    The rotations run on whichever of A, A^T has at least as many rows as
    columns; the thin factors are then completed to full orthogonal ones.

    Raises:
        NoConvergenceError: if the 30*n sweep budget is exhausted, or the
            completed factors miss the orthogonality tolerance
    """
    m, n = A.shape
    transposed = m < n
    work = (A.array.T if transposed else A.array).copy()
    p, q = work.shape
    settings = ToleranceConfig.get_svd_settings()
    max_sweeps = settings["sweep_factor"] * n

    work, V = _jacobi_sweeps(work, accumulate=True, max_sweeps=max_sweeps)

    sigma = np.linalg.norm(work, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    work = work[:, order]
    V = V[:, order]

    cutoff = ToleranceConfig.rank_tolerance(p, q, sigma[0] if q else 0.0)
    nonzero = [j for j in range(q) if sigma[j] > cutoff and sigma[j] > 0.0]
    left_thin = work[:, nonzero] / sigma[nonzero]
    # completion keeps the nonzero-sigma columns in place
    full_left = _complete_orthonormal(left_thin, p)

    if transposed:
        U, Vt = V, full_left.T
    else:
        U, Vt = full_left, V.T

    tol = settings["orthogonality_tol"]
    if np.max(np.abs(U.T @ U - np.eye(U.shape[0]))) > tol or np.max(np.abs(Vt @ Vt.T - np.eye(Vt.shape[0]))) > tol:
        raise NoConvergenceError(max_sweeps)
    return SvdFactors(U, sigma, Vt)


def singular_values(array: np.ndarray) -> np.ndarray:
    """Nonincreasing singular values of a plain array, no factors accumulated."""
    a = np.asarray(array, dtype=float)
    if a.size == 0:
        return np.zeros(0)
    work = (a.T if a.shape[0] < a.shape[1] else a).copy()
    max_sweeps = ToleranceConfig.get_svd_settings()["sweep_factor"] * max(a.shape[1], 1)
    work, _ = _jacobi_sweeps(work, accumulate=False, max_sweeps=max_sweeps)
    return np.sort(np.linalg.norm(work, axis=0))[::-1]


def submatrix_rank(array: np.ndarray) -> int:
    """
    Numerical rank of a plain array; arrays with no columns (or rows) have rank 0.

    Singular values above max(m, n) * eps * sigma_max count.
    """
    a = np.asarray(array, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.size == 0:
        return 0
    sigma = singular_values(a)
    if sigma[0] == 0.0:
        return 0
    cutoff = ToleranceConfig.rank_tolerance(a.shape[0], a.shape[1], sigma[0])
    return int(np.count_nonzero(sigma > cutoff))


def numerical_rank(A: DenseMatrix) -> int:
    return submatrix_rank(A.array)


def condition_number(W: np.ndarray) -> float:
    sigma = singular_values(W)
    if sigma.size == 0 or sigma[-1] == 0.0:
        return float("inf")
    return float(sigma[0] / sigma[-1])


def null_space_basis(A: DenseMatrix) -> np.ndarray:
    """Columns form an orthonormal basis of {x : Ax = 0} (n x (n - rank))."""
    factors = svd(A)
    rank = numerical_rank(A)
    return factors.Vt[rank:].T.copy()


def least_squares_solution(A: DenseMatrix, b: np.ndarray) -> np.ndarray:
    """Minimum-norm least-squares solution V Sigma^+ U^T b."""
    b = np.asarray(b, dtype=float)
    if b.shape != (A.rows,):
        raise DimensionMismatchError(f"Right-hand side has shape {b.shape}, expected ({A.rows},)")
    factors = svd(A)
    sigma = factors.singular_values
    rank = numerical_rank(A)
    coeffs = factors.U[:, :rank].T @ b / sigma[:rank]
    return factors.Vt[:rank].T @ coeffs


def count_sparsity(x, zero_tol: Optional[float] = None) -> int:
    """
    Number of entries with |x_i| > zero_tol.

    The default tolerance is SPARSITY_RELATIVE_TOL * max|x| (0 for the zero vector).
    """
    values = np.abs(np.asarray(x, dtype=float).reshape(-1))
    if values.size == 0:
        return 0
    if zero_tol is None:
        zero_tol = ToleranceConfig.SPARSITY_RELATIVE_TOL * float(values.max())
    return int(np.count_nonzero(values > zero_tol))
