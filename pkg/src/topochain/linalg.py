"""Dense complex-matrix kernels with explicit accuracy contracts.

Matrices here never exceed a few hundred rows, so everything is dense. The
heavy lifting is done by LAPACK (through numpy/scipy); this module adds the
input gates and a posteriori residual checks that the rest of the package
relies on. All norms are Frobenius (matrices) or Euclidean (vectors).
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, NonHermitianError, SingularMatrixError, ValidationError

HERMITIAN_RTOL = 1e-12
EIG_RTOL = 1e-10
SOLVE_RTOL = 1e-10
PIVOT_RTOL = 1e-14


def _frobenius(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))


def check_hermitian(m: np.ndarray) -> None:
    """Raise ``NonHermitianError`` unless max|M - M^H| < 1e-12 max|M|.

    Works on a single matrix or a stack of them (leading batch axes).
    """
    m = np.asarray(m)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValidationError(f"expected square matrix, got shape {m.shape}")
    if m.shape[-1] < 1:
        raise ValidationError("matrix dimension must be >= 1")
    asym = np.abs(m - np.conj(np.swapaxes(m, -1, -2))).max(axis=(-2, -1))
    scale = np.abs(m).max(axis=(-2, -1))
    bad = asym > HERMITIAN_RTOL * scale
    if np.any(bad):
        idx = np.unravel_index(np.argmax(np.where(bad, asym, -1.0)), np.shape(asym))
        raise NonHermitianError(float(np.asarray(asym)[idx]), float(np.asarray(scale)[idx]))


def hermitian_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix (or a stack of them).

    Returns ``(values, vectors)`` with values ascending and eigenvectors in the
    columns of ``vectors``. The residual ``||M v - l v|| <= 1e-10 ||M|| ||v||``
    and orthonormality to 1e-10 are verified before returning.
    """
    m = np.asarray(m)
    check_hermitian(m)
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc

    norm = _frobenius(m)
    resid = m @ vectors - vectors * values[..., None, :]
    col_resid = np.sqrt(np.sum(np.abs(resid) ** 2, axis=-2)).max(axis=-1)
    # the zero matrix has an exactly zero residual
    if np.any(col_resid > EIG_RTOL * np.maximum(norm, np.finfo(float).tiny)):
        raise ConvergenceError(f"eigen-residual {np.max(col_resid):.3e} exceeds contract")
    n = m.shape[-1]
    gram = np.conj(np.swapaxes(vectors, -1, -2)) @ vectors
    ortho = np.abs(gram - np.eye(n)).max()
    if ortho > EIG_RTOL:
        raise ConvergenceError(f"eigenvectors not orthonormal (deviation {ortho:.3e})")
    return values, vectors


def _lu(a: np.ndarray):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected square matrix, got shape {a.shape}")
    norm = float(_frobenius(a))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        warnings.simplefilter("ignore", RuntimeWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    pivot = np.abs(np.diag(lu)).min() if a.shape[0] else 0.0
    if norm == 0.0 or pivot < PIVOT_RTOL * norm:
        raise SingularMatrixError(
            f"matrix is numerically singular: smallest pivot {pivot:.3e}, ||A|| = {norm:.3e}"
        )
    return a, norm, (lu, piv)


def solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``A x = b`` by LU with partial pivoting.

    Raises ``SingularMatrixError`` when a pivot falls below ``1e-14 ||A||``.
    """
    a, norm, factors = _lu(a)
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != a.shape[0]:
        raise ValidationError(f"dimension mismatch: A is {a.shape}, b has length {b.shape[0]}")
    x = scipy.linalg.lu_solve(factors, b)
    resid = np.linalg.norm(a @ x - b)
    if resid > SOLVE_RTOL * norm * np.linalg.norm(x):
        raise ConvergenceError(f"solve residual {resid:.3e} exceeds contract")
    return x


def inverse_element(a: np.ndarray, i: int, j: int) -> complex:
    """Return ``[A^-1]_{ij}`` without forming the inverse."""
    a = np.asarray(a)
    n = a.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise ValidationError(f"index ({i}, {j}) out of range for dimension {n}")
    e = np.zeros(n, dtype=complex)
    e[j] = 1.0
    return complex(solve_linear(a, e)[i])
