"""Tests for subspace extraction, rank-one maps, and the matrix exponential.

The rank oracle here is deliberately primitive: Gaussian elimination with
partial pivoting, counting pivots. It shares no code with the SVD route used
by the library, so agreement between the two is meaningful.
"""
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from igsym.errors import InvalidInput
from igsym.linalg import (
    SubspaceBasis,
    kernel_basis,
    matrix_exp,
    operator_norm_upper,
    orthogonal_complement,
    rank_one,
    row_space_basis,
)


def elimination_rank(a, tol=1e-9):
    """Pivot count from row reduction with partial pivoting."""
    m = np.array(a, dtype=float)
    rows, cols = m.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        pivot = rank + np.argmax(np.abs(m[rank:, col]))
        if abs(m[pivot, col]) <= tol:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        m[rank + 1 :] -= np.outer(m[rank + 1 :, col] / m[rank, col], m[rank])
        rank += 1
    return rank


def random_low_rank(rng, d, n, r):
    # A product of two full-rank factors has rank exactly min(d, n, r).
    return rng.standard_normal((d, r)) @ rng.standard_normal((r, n))


# ---------------------------------------------------------------- subspaces


def test_row_space_rank_matches_elimination_oracle():
    rng = np.random.default_rng(11)
    for _ in range(100):
        d = rng.integers(1, 7)
        n = rng.integers(1, 8)
        r = rng.integers(0, min(d, n) + 1)
        w = random_low_rank(rng, d, n, r)
        assert row_space_basis(w).count == elimination_rank(w) == r


def test_rank_nullity_holds_for_random_matrices():
    rng = np.random.default_rng(12)
    for _ in range(200):
        d = rng.integers(1, 7)
        n = rng.integers(1, 9)
        r = rng.integers(0, min(d, n) + 1)
        w = random_low_rank(rng, d, n, r)
        assert row_space_basis(w).count + kernel_basis(w).count == n


def test_row_space_spans_the_rows():
    rng = np.random.default_rng(13)
    w = random_low_rank(rng, 5, 7, 3)
    basis = row_space_basis(w)
    # every row of w projects onto itself
    recon = np.array([basis.project(row) for row in w])
    np.testing.assert_allclose(recon, w, atol=1e-12)


def test_kernel_vectors_are_annihilated():
    rng = np.random.default_rng(14)
    w = random_low_rank(rng, 4, 6, 2)
    ker = kernel_basis(w)
    assert ker.count == 4
    np.testing.assert_allclose(w @ ker.vectors.T, 0.0, atol=1e-12)


def test_bases_are_orthonormal():
    rng = np.random.default_rng(15)
    for _ in range(50):
        w = random_low_rank(rng, 4, 6, int(rng.integers(0, 5)))
        assert row_space_basis(w).orthonormality_defect() <= 1e-10
        assert kernel_basis(w).orthonormality_defect() <= 1e-10


def test_orthogonal_complement_partitions_space():
    rng = np.random.default_rng(16)
    w = random_low_rank(rng, 3, 6, 2)
    rows = row_space_basis(w)
    comp = orthogonal_complement(rows)
    assert rows.count + comp.count == 6
    np.testing.assert_allclose(rows.vectors @ comp.vectors.T, 0.0, atol=1e-12)


def test_orthogonal_complement_edge_cases():
    empty = SubspaceBasis(np.zeros((0, 3)), ambient_dim=3)
    full = orthogonal_complement(empty)
    np.testing.assert_array_equal(full.vectors, np.eye(3))
    assert orthogonal_complement(full).is_empty


def test_zero_matrix_has_trivial_row_space():
    basis = row_space_basis(np.zeros((4, 5)))
    assert basis.is_empty
    assert kernel_basis(np.zeros((4, 5))).count == 5


def test_projection_is_idempotent():
    rng = np.random.default_rng(17)
    basis = row_space_basis(random_low_rank(rng, 4, 6, 2))
    x = rng.standard_normal(6)
    once = basis.project(x)
    np.testing.assert_allclose(basis.project(once), once, atol=1e-13)


@settings(max_examples=60, deadline=None)
@given(
    d=st.integers(1, 5),
    n=st.integers(1, 6),
    seed=st.integers(0, 2**32 - 1),
)
def test_rank_nullity_property(d, n, seed):
    w = np.random.default_rng(seed).standard_normal((d, n))
    assert row_space_basis(w).count + kernel_basis(w).count == n


def test_rejects_bad_inputs():
    with pytest.raises(InvalidInput):
        row_space_basis(np.ones(3))
    with pytest.raises(InvalidInput):
        row_space_basis(np.array([[np.nan, 1.0]]))
    with pytest.raises(InvalidInput):
        row_space_basis(np.eye(2), tol=0.0)


# ---------------------------------------------------------------- rank_one


def test_rank_one_frozen():
    got = rank_one(np.array([1.0, 2.0]), np.array([3.0, 4.0, 5.0]))
    np.testing.assert_array_equal(got, [[3.0, 4.0, 5.0], [6.0, 8.0, 10.0]])


def test_rank_one_acts_as_inner_product_scaling():
    rng = np.random.default_rng(18)
    x, y, z = rng.standard_normal((3, 5))
    np.testing.assert_allclose(rank_one(x, y) @ z, np.dot(y, z) * x)


# ------------------------------------------------------------ matrix norms


def test_operator_norm_upper_frozen_values():
    assert operator_norm_upper(np.eye(2)) == pytest.approx(np.sqrt(2.0))
    assert operator_norm_upper(np.zeros((3, 3))) == 0.0
    assert operator_norm_upper(np.array([[3.0, 4.0]])) == 5.0


def test_operator_norm_upper_bounds_spectral_norm():
    rng = np.random.default_rng(19)
    for _ in range(50):
        a = rng.standard_normal((4, 4))
        assert operator_norm_upper(a) >= np.linalg.norm(a, 2) - 1e-12


# -------------------------------------------------------- matrix exponential


def test_exp_of_zero_is_identity():
    np.testing.assert_array_equal(matrix_exp(np.zeros((3, 3))), np.eye(3))


def test_exp_of_nilpotent_frozen():
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(matrix_exp(a), [[1.0, 1.0], [0.0, 1.0]], atol=1e-16)


def test_exp_of_planar_rotation_generator():
    theta = 0.7
    a = theta * np.array([[0.0, -1.0], [1.0, 0.0]])
    want = [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
    np.testing.assert_allclose(matrix_exp(a), want, atol=1e-15)


def test_exp_matches_scipy():
    rng = np.random.default_rng(20)
    for scale in (0.01, 1.0, 7.0, 40.0):
        a = scale * rng.standard_normal((5, 5))
        ours = matrix_exp(a)
        ref = scipy.linalg.expm(a)
        np.testing.assert_allclose(ours, ref, rtol=1e-12, atol=1e-12 * np.linalg.norm(ref))


def test_exp_matches_truncated_series_for_small_norm():
    """For Frobenius norm <= 0.1 a 20-term Taylor sum is itself accurate to
    far below 1e-12, so it can act as a frozen reference."""
    rng = np.random.default_rng(21)
    for _ in range(20):
        a = rng.standard_normal((4, 4))
        a *= 0.1 / np.linalg.norm(a)
        series = np.eye(4)
        term = np.eye(4)
        for k in range(1, 21):
            term = term @ a / k
            series = series + term
        assert np.max(np.abs(matrix_exp(a) - series)) <= 1e-12


def test_exp_group_law():
    rng = np.random.default_rng(22)
    a = rng.standard_normal((4, 4))
    for s, t in [(0.3, 0.5), (1.0, -0.4), (2.0, 2.0)]:
        lhs = matrix_exp((s + t) * a)
        rhs = matrix_exp(s * a) @ matrix_exp(t * a)
        assert np.max(np.abs(lhs - rhs)) <= 1e-8 * max(1.0, np.max(np.abs(lhs)))


def test_exp_inverse():
    rng = np.random.default_rng(23)
    a = rng.standard_normal((3, 3))
    np.testing.assert_allclose(matrix_exp(a) @ matrix_exp(-a), np.eye(3), atol=1e-12)


def test_exp_of_skew_matrix_is_orthogonal():
    rng = np.random.default_rng(24)
    s = rng.standard_normal((5, 5))
    a = s - s.T
    q = matrix_exp(a)
    np.testing.assert_allclose(q @ q.T, np.eye(5), atol=1e-12)
    assert np.linalg.det(q) == pytest.approx(1.0, abs=1e-12)


def test_exp_rejects_bad_inputs():
    with pytest.raises(InvalidInput):
        matrix_exp(np.ones((2, 3)))
    with pytest.raises(InvalidInput):
        matrix_exp(np.array([[np.inf, 0.0], [0.0, 0.0]]))
    with pytest.raises(InvalidInput):
        matrix_exp(np.eye(2), tol=-1.0)
