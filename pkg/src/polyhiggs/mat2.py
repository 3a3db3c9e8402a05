"""Fixed-size complex linear algebra for 2x2 matrices and 2-vectors.

Vectors are numpy arrays of shape (2,) with complex dtype; column vectors and
row covectors share the same storage, with context deciding whether an array
pairs from the left or the right.  Matrices are (2, 2) complex arrays.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .errors import SingularMetric
from .tolerances import DEFAULT, Tolerances

CMat = NDArray[np.complex128]

ID2 = np.eye(2, dtype=complex)

# Pauli basis of traceless hermitian matrices.
SIGMA = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


def mat(a, b, c, d) -> CMat:
    """Build a 2x2 complex matrix from its entries."""
    return np.array([[a, b], [c, d]], dtype=complex)


def traceless(A: CMat) -> CMat:
    """Trace-free part A - (tr A / 2) Id.

    The trace of the result is removed by explicit symmetric subtraction so
    that it vanishes exactly in floating point.
    """
    A = np.asarray(A, dtype=complex)
    half = (A[0, 0] - A[1, 1]) / 2.0
    return np.array([[half, A[0, 1]], [A[1, 0], -half]], dtype=complex)


def trace_pairing(A: CMat, B: CMat) -> complex:
    """The pairing tr(A† B); for A = B this is the squared Frobenius norm."""
    return complex(np.sum(np.conj(A) * B))


def frob(A: CMat) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(A))


def dagger(A: CMat) -> CMat:
    """Conjugate transpose."""
    return np.conj(np.asarray(A, dtype=complex)).T


def is_hermitian(A: CMat, tol: Tolerances = DEFAULT) -> bool:
    """Entrywise hermiticity check against ``tol.herm``."""
    return bool(np.max(np.abs(A - dagger(A))) <= tol.herm)


def is_positive(h: CMat) -> bool:
    """Positive-definiteness of a hermitian 2x2 matrix."""
    return bool(np.real(h[0, 0]) > 0 and np.real(np.linalg.det(h)) > 0)


def adjoint_wrt(h: CMat, B: CMat, tol: Tolerances = DEFAULT) -> CMat:
    """The h-adjoint h⁻¹ B† h of B for a positive hermitian metric h."""
    det = np.linalg.det(h)
    if abs(det) < tol.det_floor:
        raise SingularMetric(f"metric determinant {det} below floor")
    hinv = np.array([[h[1, 1], -h[0, 1]], [-h[1, 0], h[0, 0]]], dtype=complex) / det
    return hinv @ dagger(B) @ h


def expm_herm(A: CMat) -> CMat:
    """Matrix exponential of a traceless hermitian 2x2 matrix.

    Uses A² = m² Id with m = sqrt(-det A), so exp(A) = cosh(m) Id + sinh(m)/m A.
    """
    m2 = -np.linalg.det(A)
    m = np.sqrt(abs(np.real(m2)))
    if m < 1e-150:
        return ID2 + A
    return float(np.cosh(m)) * ID2 + float(np.sinh(m) / m) * A


def herm_to_r3(M: CMat) -> NDArray[np.float64]:
    """Coordinates of a traceless hermitian matrix in the Pauli basis.

    Normalized so that the Euclidean norm of the output equals the Frobenius
    norm of M: for M = Σ m_k σ_k the output is √2 (m_1, m_2, m_3).
    """
    return np.array(
        [np.real(trace_pairing(s, M)) / np.sqrt(2.0) for s in SIGMA], dtype=float
    )
