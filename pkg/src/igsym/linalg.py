"""Dense linear algebra kernels: subspace bases, rank-one maps, matrix exponential.

Conventions
-----------
Vectors are 1-D float64 arrays. Matrices are 2-D float64 arrays. A subspace is
carried as a ``SubspaceBasis`` whose ``vectors`` attribute stacks orthonormal
basis vectors as rows, so ``vectors @ vectors.T == I`` up to rounding.

Rank decisions use a relative singular-value threshold ``tol * s_max``; the
default ``tol=1e-10`` matches the package-wide contract for rank-revealing
operations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

DEFAULT_RANK_TOL = 1e-10


def _as_matrix(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise InvalidInput(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains non-finite entries")
    return arr


def _as_vector(a, name: str = "vector") -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1:
        raise InvalidInput(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of R^ambient_dim.

    Attributes:
        vectors: array of shape (count, ambient_dim); rows are the basis.
        ambient_dim: dimension of the surrounding space.
        tol: the rank tolerance used when the basis was extracted.
    """

    vectors: np.ndarray
    ambient_dim: int
    tol: float = DEFAULT_RANK_TOL

    def __post_init__(self):
        arr = np.asarray(self.vectors, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != self.ambient_dim:
            raise InvalidInput(
                f"basis vectors must have shape (count, {self.ambient_dim}), got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("basis vectors contain non-finite entries")
        object.__setattr__(self, "vectors", arr)

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    def orthonormality_defect(self) -> float:
        """max |V V^T - I|, zero for an exactly orthonormal row stack."""
        if self.is_empty:
            return 0.0
        gram = self.vectors @ self.vectors.T
        return float(np.max(np.abs(gram - np.eye(self.count))))

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of x onto the subspace."""
        x = _as_vector(x, "x")
        if self.is_empty:
            return np.zeros_like(x)
        return self.vectors.T @ (self.vectors @ x)


def row_space_basis(weight, tol: float = DEFAULT_RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of the span of the rows of ``weight``.

    Uses the SVD: right singular vectors whose singular value exceeds
    ``tol * s_max`` span the row space.
    """
    W = _as_matrix(weight, "weight")
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    _, s, vh = np.linalg.svd(W, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > tol * s[0]))
    return SubspaceBasis(vh[:rank], ambient_dim=W.shape[1], tol=tol)


def kernel_basis(weight, tol: float = DEFAULT_RANK_TOL) -> SubspaceBasis:
    """Orthonormal basis of the null space of ``weight``."""
    W = _as_matrix(weight, "weight")
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    _, s, vh = np.linalg.svd(W, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > tol * s[0]))
    return SubspaceBasis(vh[rank:], ambient_dim=W.shape[1], tol=tol)


def orthogonal_complement(basis: SubspaceBasis) -> SubspaceBasis:
    """Orthonormal basis of the orthogonal complement of ``basis``."""
    n = basis.ambient_dim
    if basis.is_empty:
        return SubspaceBasis(np.eye(n), ambient_dim=n, tol=basis.tol)
    if basis.count == n:
        return SubspaceBasis(np.zeros((0, n)), ambient_dim=n, tol=basis.tol)
    # The complement of the row span is the kernel of the stacked rows.
    return kernel_basis(basis.vectors, tol=basis.tol)


def rank_one(x, y) -> np.ndarray:
    """The map z -> <y, z> x, i.e. the outer product x y^T."""
    xv = _as_vector(x, "x")
    yv = _as_vector(y, "y")
    return np.outer(xv, yv)


def operator_norm_upper(a) -> float:
    """Frobenius norm: a cheap certified upper bound on the spectral norm."""
    A = _as_matrix(a, "a")
    return float(np.linalg.norm(A))


def matrix_exp(a, tol: float = 1e-16) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring over the power series.

    The input is scaled by 2**-s until its Frobenius norm is at most 0.5,
    the series sum(B^k / k!) is accumulated until the next term's norm falls
    below ``tol``, and the result is squared s times.
    """
    A = _as_matrix(a, "a")
    if A.shape[0] != A.shape[1]:
        raise InvalidInput(f"matrix_exp needs a square matrix, got {A.shape}")
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    n = A.shape[0]
    norm = float(np.linalg.norm(A))
    squarings = 0
    while norm > 0.5:
        norm /= 2.0
        squarings += 1
    B = A / float(2 ** squarings)
    result = np.eye(n)
    term = np.eye(n)
    k = 1
    while True:
        term = term @ B / k
        result = result + term
        if float(np.linalg.norm(term)) < tol:
            break
        k += 1
        if k > 128:  # unreachable for norm <= 0.5; guards against NaN loops
            raise InvalidInput("matrix_exp series failed to converge")
    for _ in range(squarings):
        result = result @ result
    return result
