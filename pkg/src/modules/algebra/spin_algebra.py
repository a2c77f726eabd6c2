"""
Complex spin algebra - Pauli correspondence and 2x2 matrix identities
src/modules/algebra/spin_algebra.py

Spins are complex 3-vectors (numpy arrays of shape (3,) or (..., 3)).
The dot product is the bilinear form s·t = s1 t1 + s2 t2 + s3 t3 (no conjugation);
the Hermitian form only appears where explicitly named.
"""

from typing import Optional, Union
import logging

import numpy as np
from numpy.typing import ArrayLike

from ..config.hwm_config import ToleranceConfig, DEFAULT_TOLERANCES
from ..utils.errors import NonTraceless

logger = logging.getLogger(__name__)

ComplexSpin = np.ndarray  # shape (3,), complex128
Mat2 = np.ndarray         # shape (2, 2), complex128

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])
PAULI.setflags(write=False)


def as_spin(s: ArrayLike) -> ComplexSpin:
    """Coerce to a complex array whose last axis has length 3."""
    arr = np.asarray(s, dtype=complex)
    if arr.shape[-1:] != (3,):
        raise ValueError(f"Expected spin(s) with trailing dimension 3, got shape {arr.shape}")
    return arr


def dot(s: ArrayLike, t: ArrayLike) -> Union[complex, np.ndarray]:
    """Bilinear dot product over the last axis."""
    return np.sum(as_spin(s) * as_spin(t), axis=-1)


def cross(s: ArrayLike, t: ArrayLike) -> np.ndarray:
    """Bilinear cross product over the last axis."""
    return np.cross(as_spin(s), as_spin(t))


def hermitian_norm(s: ArrayLike) -> Union[float, np.ndarray]:
    """sqrt(s·s̄), the only place the conjugated form is used."""
    return np.sqrt(np.sum(np.abs(as_spin(s)) ** 2, axis=-1))


def spin_to_matrix(s: ArrayLike) -> Mat2:
    """
    Pauli correspondence s -> s·σ = [[s3, s1 - i s2], [s1 + i s2, -s3]].

    Works on a single spin (3,) or a stack (..., 3) -> (..., 2, 2).
    """
    return np.einsum("...k,kab->...ab", as_spin(s), PAULI)


def matrix_to_spin(M: ArrayLike, tol: Optional[ToleranceConfig] = None, strict: bool = True) -> ComplexSpin:
    """
    Inverse Pauli correspondence m_k = ½ Tr(M σ_k).

    Raises:
        NonTraceless: if |Tr M| > trace_tol · ‖M‖ and strict is set
    """
    tol = tol or DEFAULT_TOLERANCES
    M = np.asarray(M, dtype=complex)
    if M.shape[-2:] != (2, 2):
        raise ValueError(f"Expected 2x2 matrix, got shape {M.shape}")

    trace = np.trace(M, axis1=-2, axis2=-1)
    scale = np.linalg.norm(M, axis=(-2, -1))
    if strict and np.any(np.abs(trace) > tol.trace_tol * scale):
        raise NonTraceless(f"|Tr M| = {np.max(np.abs(trace)):.3e} exceeds {tol.trace_tol:.1e} relative to ‖M‖")

    return 0.5 * np.einsum("...ab,kba->...k", M, PAULI)


def commutator(A: ArrayLike, B: ArrayLike) -> Mat2:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    return A @ B - B @ A


def anticommutator(A: ArrayLike, B: ArrayLike) -> Mat2:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    return A @ B + B @ A


def is_null(s: ArrayLike, tol: Optional[ToleranceConfig] = None) -> bool:
    tol = tol or DEFAULT_TOLERANCES
    return bool(np.all(np.abs(dot(s, s)) <= tol.null_tol))


def adjoint(M: ArrayLike) -> np.ndarray:
    """Hermitian conjugate over the last two axes."""
    return np.conj(np.swapaxes(np.asarray(M, dtype=complex), -1, -2))
