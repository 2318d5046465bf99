"""Continuous symmetries of the affine head: generator algebras and sampling.

For a head weight W, the linear maps that annihilate its row space form a
Lie algebra spanned by ``rank_one(e_i, y_j)`` over the standard basis vectors
e_i and an orthonormal basis {y_j} of the orthogonal complement of the row
space. Exponentials of these generators fix every row of W and therefore
leave the network function unchanged.

The antisymmetrized generators ``y_i y_j^T - y_j y_i^T`` span the
skew-symmetric sub-algebra; their exponentials are rotations, which is what
the distance-bounded attack needs (orthogonal maps preserve norms, so the
displacement bound in :func:`igsym.attack.exponent_scale_bound` applies).

A full-rank head has no such generators: the constructors then return a
basis with ``count == 0`` and the samplers raise :class:`EmptyAlgebra`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import EmptyAlgebra, InvalidInput
from .linalg import (
    DEFAULT_RANK_TOL,
    SubspaceBasis,
    _as_matrix,
    _as_vector,
    kernel_basis,
    matrix_exp,
    orthogonal_complement,
    rank_one,
    row_space_basis,
)
from .network import MlpNetwork, forward


@dataclass(frozen=True)
class LieAlgebraBasis:
    """Ordered generator list for a symmetry algebra of a weight matrix."""

    kind: str  # "full" or "skew"
    generators: np.ndarray  # (count, n, n)
    row_space: SubspaceBasis
    complement: SubspaceBasis

    @property
    def count(self) -> int:
        return self.generators.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.row_space.ambient_dim

    @property
    def is_empty(self) -> bool:
        return self.count == 0


@dataclass(frozen=True)
class SymmetryElement:
    """A sampled symmetry: a linear map g or a translation u, with provenance."""

    kind: str  # "linear" or "translation"
    matrix: Optional[np.ndarray] = None
    vector: Optional[np.ndarray] = None
    provenance: dict = field(default_factory=dict)

    def transform_input(self, x: np.ndarray) -> np.ndarray:
        """The input-space action that leaves the network output unchanged.

        Linear elements act as x -> g^T x; translations as x -> x - u.
        """
        if self.kind == "linear":
            return np.asarray(x, dtype=float) @ self.matrix
        return np.asarray(x, dtype=float) - self.vector


@dataclass(frozen=True)
class SymmetryCheck:
    passed: bool
    max_residual: float
    n_samples: int
    tol: float


def stabilizer_algebra(weight, tol: float = DEFAULT_RANK_TOL) -> LieAlgebraBasis:
    """Generators of all linear maps annihilating the row space of ``weight``.

    Returns n*(n-r) generators rank_one(e_i, y_j), ordered i-major over the
    standard basis and j-minor over the complement basis. A full-rank weight
    yields an empty basis.
    """
    W = _as_matrix(weight, "weight")
    n = W.shape[1]
    rows = row_space_basis(W, tol)
    comp = orthogonal_complement(rows)
    gens = np.empty((n * comp.count, n, n))
    eye = np.eye(n)
    idx = 0
    for i in range(n):
        for j in range(comp.count):
            gens[idx] = rank_one(eye[i], comp.vectors[j])
            idx += 1
    return LieAlgebraBasis(kind="full", generators=gens, row_space=rows, complement=comp)


def skew_stabilizer_algebra(weight, tol: float = DEFAULT_RANK_TOL) -> LieAlgebraBasis:
    """Skew-symmetric generators y_i y_j^T - y_j y_i^T over the complement basis.

    Their exponentials are rotations fixing every row of ``weight``; the
    count is (n-r)(n-r-1)/2, which vanishes when the complement has
    dimension below two.
    """
    W = _as_matrix(weight, "weight")
    n = W.shape[1]
    rows = row_space_basis(W, tol)
    comp = orthogonal_complement(rows)
    k = comp.count
    gens = np.empty((k * (k - 1) // 2, n, n))
    idx = 0
    for i in range(k):
        for j in range(i + 1, k):
            gens[idx] = rank_one(comp.vectors[i], comp.vectors[j]) - rank_one(
                comp.vectors[j], comp.vectors[i]
            )
            idx += 1
    return LieAlgebraBasis(kind="skew", generators=gens, row_space=rows, complement=comp)


def sample_group_element(basis: LieAlgebraBasis, coeffs, scale: float) -> SymmetryElement:
    """exp(scale * sum(coeffs[i] * G_i)) as a linear symmetry element."""
    if basis.is_empty:
        raise EmptyAlgebra(
            "symmetry algebra has no generators (full-rank head weight)"
        )
    c = _as_vector(coeffs, "coeffs")
    if c.shape[0] != basis.count:
        raise InvalidInput(
            f"expected {basis.count} coefficients, got {c.shape[0]}"
        )
    if not np.isfinite(scale):
        raise InvalidInput("scale must be finite")
    gen = np.tensordot(c, basis.generators, axes=(0, 0))
    g = matrix_exp(float(scale) * gen)
    return SymmetryElement(
        kind="linear",
        matrix=g,
        provenance={
            "algebra": basis.kind,
            "coefficients": c.tolist(),
            "scale": float(scale),
        },
    )


def sample_kernel_translation(weight, seed: int, epsilon: float) -> SymmetryElement:
    """A translation u in the kernel of ``weight`` with ||u|| = epsilon."""
    W = _as_matrix(weight, "weight")
    if not np.isfinite(epsilon) or epsilon < 0:
        raise InvalidInput("epsilon must be nonnegative")
    kern = kernel_basis(W)
    if kern.is_empty:
        raise EmptyAlgebra("weight has a trivial kernel; no translation symmetry")
    rng = np.random.default_rng(seed)
    mix = rng.standard_normal(kern.count)
    u = kern.vectors.T @ mix
    u = float(epsilon) * u / np.linalg.norm(u)
    return SymmetryElement(
        kind="translation",
        vector=u,
        provenance={"seed": int(seed), "epsilon": float(epsilon)},
    )


def verify_symmetry(
    element: SymmetryElement,
    net: MlpNetwork,
    n_samples: int = 100,
    tol: float = 1e-8,
    seed: int = 0,
) -> SymmetryCheck:
    """Check F(transformed x) == F(x) on standard-normal samples.

    Returns the max output residual (2-norm per sample) and the pass flag.
    """
    if n_samples < 1:
        raise InvalidInput("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((n_samples, net.input_dim))
    base = forward(net, xs)
    moved = forward(net, element.transform_input(xs))
    residual = float(np.max(np.linalg.norm(moved - base, axis=1)))
    return SymmetryCheck(
        passed=residual <= tol, max_residual=residual, n_samples=n_samples, tol=tol
    )


def adapted_block_residuals(g, weight, tol: float = DEFAULT_RANK_TOL):
    """Deviation of g from the expected block structure in the adapted basis.

    With B stacking a row-space basis above a complement basis, B g B^T must
    have an identity upper-left block and a zero lower-left block whenever g
    fixes the row space pointwise. Returns (identity_defect, lower_defect).
    """
    gm = _as_matrix(g, "g")
    W = _as_matrix(weight, "weight")
    n = W.shape[1]
    if gm.shape != (n, n):
        raise InvalidInput(f"g must be {n}x{n}, got {gm.shape}")
    rows = row_space_basis(W, tol)
    comp = orthogonal_complement(rows)
    B = np.vstack([rows.vectors, comp.vectors])
    M = B @ gm @ B.T
    r = rows.count
    identity_defect = float(np.max(np.abs(M[:r, :r] - np.eye(r)))) if r else 0.0
    lower_defect = float(np.max(np.abs(M[r:, :r]))) if r and r < n else 0.0
    return identity_defect, lower_defect
