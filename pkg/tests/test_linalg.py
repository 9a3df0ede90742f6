"""Dense linear-algebra primitives."""

import numpy as np
import pytest

from pairnmf import SingularMatrixError, frobenius_sq, hadamard_update, matmul, solve_spd
from pairnmf.errors import ContractViolation
from pairnmf.linalg import as_nonneg_matrix, as_real_matrix


def test_as_real_matrix_rejects_non_2d():
    with pytest.raises(ContractViolation):
        as_real_matrix(np.zeros(3), "x")
    with pytest.raises(ContractViolation):
        as_real_matrix(np.zeros((2, 2, 2)), "x")


def test_as_real_matrix_rejects_non_finite():
    with pytest.raises(ContractViolation):
        as_real_matrix(np.array([[1.0, np.nan]]), "x")
    with pytest.raises(ContractViolation):
        as_real_matrix(np.array([[1.0, np.inf]]), "x")


def test_as_nonneg_matrix_rejects_negative_entries():
    with pytest.raises(ContractViolation):
        as_nonneg_matrix(np.array([[1.0, -1e-30]]), "x")
    out = as_nonneg_matrix(np.array([[0.0, 2.0]]), "x")
    assert out.dtype == np.float64


def test_matmul_matches_numpy():
    rng = np.random.default_rng(0)
    a = rng.random((4, 6))
    b = rng.random((6, 3))
    assert np.array_equal(matmul(a, b), a @ b)


def test_matmul_rejects_mismatched_inner_dims():
    with pytest.raises(ContractViolation):
        matmul(np.zeros((2, 3)), np.zeros((4, 2)))


def test_hadamard_update_elementwise_formula():
    rng = np.random.default_rng(1)
    base = rng.random((5, 4))
    numer = rng.random((5, 4))
    denom = rng.random((5, 4))
    eps = 1e-12
    out = hadamard_update(base, numer, denom, eps)
    assert np.array_equal(out, base * numer / (denom + eps))


def test_hadamard_update_zero_denominator_stays_finite():
    base = np.ones((2, 2))
    numer = np.ones((2, 2))
    denom = np.zeros((2, 2))
    out = hadamard_update(base, numer, denom, 1e-12)
    assert np.all(np.isfinite(out))
    assert np.all(out >= 0)


def test_frobenius_sq_oracle():
    # sum of squares computed by hand
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert frobenius_sq(a) == 30.0
    rng = np.random.default_rng(2)
    b = rng.standard_normal((7, 9))
    assert frobenius_sq(b) == pytest.approx(np.sum(b * b), rel=1e-14)


def test_solve_spd_matches_dense_solve():
    rng = np.random.default_rng(3)
    m = rng.random((6, 6))
    a = m @ m.T + 0.5 * np.eye(6)
    b = rng.random((6, 4))
    x = solve_spd(a, b, ridge=0.0)
    assert np.allclose(x, np.linalg.solve(a, b), rtol=1e-10, atol=1e-12)


def test_solve_spd_ridge_regularizes():
    a = np.eye(3)
    b = np.ones((3, 1))
    x = solve_spd(a, b, ridge=1.0)
    assert np.allclose(x, b / 2.0)


def test_solve_spd_singular_raises():
    a = np.zeros((3, 3))
    with pytest.raises(SingularMatrixError):
        solve_spd(a, np.ones((3, 1)), ridge=0.0)
