"""
Solution constraints of the rational ansatz
src/modules/dynamics/constraints.py

A datum (m₀, x_j, s_j) generates a Half-Wave Maps solution iff
    M₀² = I, M₀* = M₀, Tr M₀ = 0, A_j² = 0, B_j A_j + A_j B_j = 0
with A_j = s_j·σ and
    B_j = M₀ + A_j*/(x_j - x̄_j) + Σ_{k≠j} [A_k*/(x_j - x̄_k) + A_k/(x_j - x_k)].
Then B_j A_j = b_j A_j and b_j = ẋ_j(0).
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Any
import logging

import numpy as np
from numpy.typing import ArrayLike

from ..algebra.spin_algebra import (
    IDENTITY_2, adjoint, anticommutator, commutator, dot, spin_to_matrix,
)
from ..config.hwm_config import ToleranceConfig, DEFAULT_TOLERANCES
from ..datasets.rational_data import RationalData
from ..utils.errors import DegeneratePoles, NotProportional

logger = logging.getLogger(__name__)


@dataclass
class ConstraintReport:
    """Per-site and m₀ residuals of the constraint set."""
    null_residuals: np.ndarray          # |s_j·s_j|
    anticomm_residuals: np.ndarray      # ‖B_jA_j + A_jB_j‖ / ‖A_j‖
    eigen_residuals: np.ndarray         # ‖B_jA_j - b_jA_j‖ / ‖A_j‖
    spin_norms: np.ndarray              # ‖A_j‖
    m0_square_residual: float           # ‖M₀² - I‖
    m0_trace_residual: float            # |Tr M₀|
    m0_hermitian_residual: float        # ‖M₀ - M₀*‖
    velocities: np.ndarray              # b_j
    min_separation: float
    min_imag: float
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)

    @property
    def n(self) -> int:
        return int(self.null_residuals.shape[0])

    def failures(self) -> List[str]:
        """Human-readable list of violated constraints (empty when valid)."""
        tol = self.tolerances
        issues = []
        if self.m0_square_residual >= tol.residual_tol:
            issues.append(f"M0^2 != I (residual {self.m0_square_residual:.3e})")
        if self.m0_trace_residual >= tol.residual_tol:
            issues.append(f"Tr M0 != 0 (residual {self.m0_trace_residual:.3e})")
        if self.m0_hermitian_residual >= tol.residual_tol:
            issues.append(f"M0 not Hermitian (residual {self.m0_hermitian_residual:.3e})")
        if self.n > 0 and self.min_imag < tol.imag_guard:
            issues.append(f"pole too close to the real axis (min Im x = {self.min_imag:.3e})")
        if self.n > 1 and self.min_separation < tol.separation_guard:
            issues.append(f"poles not distinct (min separation {self.min_separation:.3e})")
        for j in range(self.n):
            if self.spin_norms[j] < tol.spin_floor:
                issues.append(f"site {j}: vanishing spin")
            if not self.null_residuals[j] < tol.null_tol:
                issues.append(f"site {j}: s.s = {self.null_residuals[j]:.3e} (not null)")
            if not self.anticomm_residuals[j] < tol.residual_tol:
                issues.append(f"site {j}: B A + A B residual {self.anticomm_residuals[j]:.3e}")
            if not self.eigen_residuals[j] < tol.residual_tol:
                issues.append(f"site {j}: B A - b A residual {self.eigen_residuals[j]:.3e}")
        return issues

    @property
    def valid(self) -> bool:
        return not self.failures()

    def max_residual(self) -> float:
        values = [self.m0_square_residual, self.m0_trace_residual, self.m0_hermitian_residual]
        for arr in (self.null_residuals, self.anticomm_residuals, self.eigen_residuals):
            if arr.size:
                values.append(float(np.max(arr)))
        return float(max(values))

    def summary(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "valid": self.valid,
            "max_residual": self.max_residual(),
            "min_separation": self.min_separation,
            "min_imag": self.min_imag,
            "failures": self.failures(),
        }


def pole_geometry(poles: ArrayLike) -> tuple:
    """(min pairwise separation, min imaginary part); inf when undefined."""
    poles = np.asarray(poles, dtype=complex)
    min_imag = float(np.min(poles.imag)) if poles.size else float("inf")
    if poles.size < 2:
        return float("inf"), min_imag
    gaps = np.abs(poles[:, None] - poles[None, :])
    gaps[np.diag_indices_from(gaps)] = np.inf
    return float(np.min(gaps)), min_imag


def check_pole_geometry(poles: ArrayLike, tol: Optional[ToleranceConfig] = None):
    """
    Raises:
        DegeneratePoles: if poles collide or touch the real axis
    """
    tol = tol or DEFAULT_TOLERANCES
    min_sep, min_imag = pole_geometry(poles)
    if min_sep < tol.separation_guard:
        raise DegeneratePoles(f"poles not distinct: min separation {min_sep:.3e} < {tol.separation_guard:.1e}")
    if min_imag < tol.imag_guard:
        raise DegeneratePoles(f"pole too close to the real axis: min Im x = {min_imag:.3e}")


def m0_matrix(data: RationalData) -> np.ndarray:
    return spin_to_matrix(data.m0)


def b_vector(data: RationalData, j: int) -> np.ndarray:
    """Spin vector β_j with B_j = β_j·σ (m₀ real, so A* = s̄·σ)."""
    x, s = data.poles, data.spins
    xj = x[j]
    beta = data.m0.astype(complex) + np.conj(s[j]) / (xj - np.conj(xj))
    for k in range(data.n):
        if k == j:
            continue
        beta = beta + np.conj(s[k]) / (xj - np.conj(x[k])) + s[k] / (xj - x[k])
    return beta


def b_matrix(data: RationalData, j: int, tol: Optional[ToleranceConfig] = None) -> np.ndarray:
    """
    B_j = M₀ + A_j*/(x_j - x̄_j) + Σ_{k≠j} [A_k*/(x_j - x̄_k) + A_k/(x_j - x_k)].

    Raises:
        DegeneratePoles: if a denominator vanishes
    """
    check_pole_geometry(data.poles, tol)
    A = spin_to_matrix(data.spins)
    A_star = adjoint(A)
    x = data.poles
    xj = x[j]

    B = m0_matrix(data) + A_star[j] / (xj - np.conj(xj))
    for k in range(data.n):
        if k == j:
            continue
        B = B + A_star[k] / (xj - np.conj(x[k])) + A[k] / (xj - x[k])
    return B


def _projection_velocity(B: np.ndarray, A: np.ndarray) -> complex:
    """b = Tr((BA) A*) / Tr(A A*)."""
    A_star = adjoint(A)
    return complex(np.trace(B @ A @ A_star) / np.trace(A @ A_star))


def initial_velocity(data: RationalData, j: int, tol: Optional[ToleranceConfig] = None,
                     strict: bool = True) -> complex:
    """
    b_j = Tr((B_jA_j)A_j*) / Tr(A_jA_j*), the projection of B_jA_j on A_j.

    Raises:
        NotProportional: if ‖B_jA_j - b_jA_j‖ > residual_tol · ‖A_j‖ (strict only)
    """
    tol = tol or DEFAULT_TOLERANCES
    A = spin_to_matrix(data.spins[j])
    norm_A = np.linalg.norm(A)
    if norm_A < tol.spin_floor:
        if strict:
            raise NotProportional(f"site {j}: vanishing spin, velocity undefined")
        return 0j

    B = b_matrix(data, j, tol)
    b = _projection_velocity(B, A)
    residual = np.linalg.norm(B @ A - b * A)
    if strict and residual > tol.residual_tol * norm_A:
        raise NotProportional(
            f"site {j}: ‖B A - b A‖ = {residual:.3e} exceeds {tol.residual_tol:.1e}·‖A‖"
        )
    return b


def initial_velocities(data: RationalData, tol: Optional[ToleranceConfig] = None,
                       strict: bool = True) -> np.ndarray:
    return np.array([initial_velocity(data, j, tol, strict=strict) for j in range(data.n)], dtype=complex)


def trace_form_velocity(data: RationalData, j: int, tol: Optional[ToleranceConfig] = None) -> complex:
    """ẋ_j = ½ Tr([A_j, A_j*] B_j) / Tr(A_j A_j*)."""
    A = spin_to_matrix(data.spins[j])
    A_star = adjoint(A)
    B = b_matrix(data, j, tol)
    return complex(0.5 * np.trace(commutator(A, A_star) @ B) / np.trace(A @ A_star))


def validate(data: RationalData, tol: Optional[ToleranceConfig] = None) -> ConstraintReport:
    """Evaluate every constraint; never raises on invalid data."""
    tol = tol or DEFAULT_TOLERANCES
    n = data.n
    M0 = m0_matrix(data)
    min_sep, min_imag = pole_geometry(data.poles)

    null_res = np.abs(dot(data.spins, data.spins)).reshape(n)
    spin_norms = np.linalg.norm(spin_to_matrix(data.spins), axis=(-2, -1)).reshape(n)
    anticomm = np.full(n, np.inf)
    eigen = np.full(n, np.inf)
    velocities = np.full(n, np.nan, dtype=complex)

    geometry_ok = min_sep >= tol.separation_guard and min_imag >= tol.imag_guard
    if geometry_ok:
        for j in range(n):
            if spin_norms[j] < tol.spin_floor:
                continue
            A = spin_to_matrix(data.spins[j])
            B = b_matrix(data, j, tol)
            b = _projection_velocity(B, A)
            anticomm[j] = np.linalg.norm(anticommutator(A, B)) / spin_norms[j]
            eigen[j] = np.linalg.norm(B @ A - b * A) / spin_norms[j]
            velocities[j] = b

    report = ConstraintReport(
        null_residuals=null_res,
        anticomm_residuals=anticomm,
        eigen_residuals=eigen,
        spin_norms=spin_norms,
        m0_square_residual=float(np.linalg.norm(M0 @ M0 - IDENTITY_2)),
        m0_trace_residual=float(abs(np.trace(M0))),
        m0_hermitian_residual=float(np.linalg.norm(M0 - adjoint(M0))),
        velocities=velocities,
        min_separation=min_sep,
        min_imag=min_imag,
        tolerances=tol,
    )
    if report.valid:
        logger.debug(f"Datum N={n} valid (max residual {report.max_residual():.3e})")
    else:
        logger.debug(f"Datum N={n} invalid: {report.failures()}")
    return report


def soliton_frame(m0: ArrayLike) -> tuple:
    """Right-handed orthonormal (u, w, m₀) with w built from e₂ (e₁ if m₀ ∥ e₂)."""
    m0 = np.real(np.asarray(m0, dtype=complex))
    helper = np.array([0.0, 1.0, 0.0])
    if abs(np.dot(helper, m0)) > 0.9:
        helper = np.array([1.0, 0.0, 0.0])
    w = helper - np.dot(helper, m0) * m0
    w /= np.linalg.norm(w)
    u = np.cross(w, m0)
    return u, w, m0


def single_soliton(x1: complex, m0: ArrayLike = (0.0, 0.0, 1.0), phase: float = 0.0,
                   velocity: float = 0.0) -> RationalData:
    """
    Valid N=1 datum with pole x1 and real velocity `velocity` ∈ (-1, 1).

    With y = Im x1 and the frame (u, w, m₀) rotated by `phase` about m₀:
        s = a u + iμ w + iγ m₀,  γ = y(1-v²), a = y√(1-v²), μ = v a
    so that s·s = 0 and s·β₁ = 0 (both N=1 constraints), and b₁ = v.
    """
    x1 = complex(x1)
    if not x1.imag > 0:
        raise DegeneratePoles(f"single soliton needs Im x1 > 0, got {x1}")
    if not -1.0 < velocity < 1.0:
        raise ValueError(f"velocity must lie in (-1, 1), got {velocity}")
    m0 = np.real(np.asarray(m0, dtype=complex))
    if m0.shape != (3,) or abs(np.linalg.norm(m0) - 1.0) > 1e-12:
        raise ValueError(f"m0 must be a real unit 3-vector, got {m0}")

    u, w, m0 = soliton_frame(m0)
    u_phi = np.cos(phase) * u + np.sin(phase) * w
    w_phi = -np.sin(phase) * u + np.cos(phase) * w

    y = x1.imag
    gamma = y * (1.0 - velocity ** 2)
    a = y * np.sqrt(1.0 - velocity ** 2)
    mu = velocity * a
    s = a * u_phi + 1j * mu * w_phi + 1j * gamma * m0

    metadata = {"generator": "single_soliton", "phase": float(phase), "velocity": float(velocity)}
    return RationalData(m0, np.array([x1]), s.reshape(1, 3), metadata)
