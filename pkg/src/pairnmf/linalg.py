"""Dense matrix primitives used by every solver.

Matrices are plain 2-D float64 numpy arrays. ``as_real_matrix`` /
``as_nonneg_matrix`` coerce and validate inputs at module boundaries;
internal code works on the validated arrays directly.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import ContractViolation, SingularMatrixError

#: Added to every multiplicative-update denominator to avoid division by zero.
DEFAULT_EPS = 1e-12

#: Ridge used when solving normal equations during projection; W may be
#: rank-deficient at small ranks.
DEFAULT_RIDGE = 1e-10


def as_real_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a C-contiguous 2-D float64 array with finite entries."""
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out.ndim != 2:
        raise ContractViolation(f"{name} must be 2-D, got ndim={out.ndim}")
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise ContractViolation(f"{name} must be non-empty, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ContractViolation(f"{name} contains NaN or infinite entries")
    return out


def as_nonneg_matrix(a, name: str = "matrix") -> np.ndarray:
    """Like :func:`as_real_matrix`, additionally requiring entries >= 0."""
    out = as_real_matrix(a, name)
    if out.min() < 0.0:
        raise ContractViolation(f"{name} contains negative entries")
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Standard matrix product with an explicit dimension check."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ContractViolation("matmul expects 2-D operands")
    if a.shape[1] != b.shape[0]:
        raise ContractViolation(
            f"matmul dimension mismatch: {a.shape} x {b.shape}"
        )
    return a @ b


def hadamard_update(
    base: np.ndarray,
    numer: np.ndarray,
    denom: np.ndarray,
    eps: float = DEFAULT_EPS,
) -> np.ndarray:
    """Elementwise multiplicative update ``base * numer / (denom + eps)``.

    The workhorse of every update rule here; preserves non-negativity and
    exact zeros of ``base``.
    """
    base = np.asarray(base, dtype=np.float64)
    numer = np.asarray(numer, dtype=np.float64)
    denom = np.asarray(denom, dtype=np.float64)
    if not (base.shape == numer.shape == denom.shape):
        raise ContractViolation(
            f"hadamard_update shape mismatch: {base.shape}, {numer.shape}, {denom.shape}"
        )
    if eps < 0:
        raise ContractViolation("eps must be >= 0")
    return base * numer / (denom + eps)


def frobenius_sq(a: np.ndarray) -> float:
    """Sum of squared entries (squared Frobenius norm)."""
    a = np.asarray(a, dtype=np.float64)
    return float(np.sum(a * a))


def solve_spd(a: np.ndarray, b: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """Solve ``(a + ridge*I) Y = b`` for symmetric positive (semi-)definite a.

    Uses a Cholesky factorization; raises :class:`SingularMatrixError` when
    the system is numerically singular even after the ridge.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolation(f"solve_spd expects a square matrix, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ContractViolation(
            f"solve_spd rhs has {b.shape[0]} rows, expected {a.shape[0]}"
        )
    if ridge < 0:
        raise ContractViolation("ridge must be >= 0")
    system = a if ridge == 0.0 else a + ridge * np.eye(a.shape[0])
    try:
        factor = scipy.linalg.cho_factor(system, lower=True, check_finite=False)
        return scipy.linalg.cho_solve(factor, b, check_finite=False)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise SingularMatrixError(
            f"symmetric solve failed (ridge={ridge}): {exc}"
        ) from exc
