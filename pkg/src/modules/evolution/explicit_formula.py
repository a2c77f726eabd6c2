"""
Explicit resolvent formula for rational Half-Wave Maps solutions
src/modules/evolution/explicit_formula.py

All time dependence enters through X(0) + tL(0):

    Π₋M(t, x) = -Tᵀ 𝓔₀ 𝓗 [X(0) + tL(0) - x]⁻¹ 𝓕₀ T = -Σ_jk R_jk e_j ξ_kᵀ
    Π₊M(t, x) = -Tᵀ 𝓕₀* [X̄(0) + tL*(0) - x]⁻¹ 𝓗 𝓔₀* T
    M(t, x)   = M₀ + Π₋M + Π₊M

Poles at time t are the eigenvalues of X(0) + tL(0); spins are the residues
of Π₋M there. Each (t, x) evaluation is an independent N×N solve.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
import logging
import warnings

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike
from scipy.optimize import linear_sum_assignment

from ..algebra.halfspin import HalfSpinSet, assemble, block_H, double, stack_T
from ..algebra.spin_algebra import adjoint, commutator, matrix_to_spin, spin_to_matrix
from ..config.hwm_config import ToleranceConfig, DEFAULT_TOLERANCES
from ..datasets.rational_data import RationalData
from ..dynamics.lax import build_lax
from ..utils.errors import (
    BoundaryApproachWarning, DefectiveMatrix, NonRealField, ResolventSingular,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FrozenEvolution:
    """Immutable t=0 data of the explicit formula."""
    X0: np.ndarray
    L0: np.ndarray
    halfspins0: HalfSpinSet
    M0: np.ndarray
    m0: np.ndarray
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)

    @property
    def n(self) -> int:
        return int(self.X0.shape[0])

    def matrix_at(self, t: float) -> np.ndarray:
        """X(0) + tL(0)."""
        return self.X0 + t * self.L0

    @classmethod
    def from_data(cls, data: RationalData, tol: Optional[ToleranceConfig] = None,
                  strict: bool = True) -> "FrozenEvolution":
        return create_frozen_evolution(data, tol, strict=strict)


def create_frozen_evolution(data: RationalData, tol: Optional[ToleranceConfig] = None,
                            strict: bool = True) -> FrozenEvolution:
    """
    Freeze a datum for explicit evaluation.

    Raises:
        NotNull, NotProportional, DegeneratePoles: when strict and the datum is invalid
    """
    tol = tol or DEFAULT_TOLERANCES
    halfspins = assemble(data, tol, strict=strict)
    lax = build_lax(data, tol, strict=strict, halfspins=halfspins)
    fe = FrozenEvolution(
        X0=np.diag(data.poles.astype(complex)),
        L0=lax.L,
        halfspins0=halfspins,
        M0=spin_to_matrix(data.m0),
        m0=np.real(data.m0).astype(float),
        tolerances=tol,
    )
    logger.debug(f"Frozen evolution for N={fe.n}, Tr L0 = {np.trace(lax.L):.6g}")
    return fe


def _solve(matrix: np.ndarray, rhs: np.ndarray, where: str) -> np.ndarray:
    """Dense solve that treats ill-conditioning or a non-finite result as a singular resolvent."""
    try:
        with warnings.catch_warnings(), np.errstate(divide="ignore", invalid="ignore"):
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            result = scipy.linalg.solve(matrix, rhs)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning, ValueError) as e:
        raise ResolventSingular(f"resolvent singular at {where}: {e}") from e
    # small diagonal systems can divide by an exact zero pivot without raising
    if not np.all(np.isfinite(result)):
        raise ResolventSingular(f"resolvent singular at {where}: non-finite solution")
    return result


def pi_minus(fe: FrozenEvolution, t: float, x: complex) -> np.ndarray:
    """
    Π₋M(t, x) = -Σ_jk R_jk E_j(0) H F_k(0) with R = (X(0) + tL(0) - xI)⁻¹.

    Raises:
        ResolventSingular: if x is an eigenvalue of X(0) + tL(0)
    """
    if fe.n == 0:
        return np.zeros((2, 2), dtype=complex)
    hs = fe.halfspins0
    system = fe.matrix_at(t) - x * np.eye(fe.n)
    resolvent_xi = _solve(system, hs.xi_rows, f"t={t}, x={x}")
    return -hs.e_rows.T @ resolvent_xi


def pi_plus(fe: FrozenEvolution, t: float, x: complex) -> np.ndarray:
    """
    Π₊M(t, x) = -Tᵀ 𝓕₀* [X̄(0) + tL*(0) - xI]⁻¹ 𝓗 𝓔₀* T.

    For real x this is the Hermitian conjugate of Π₋M(t, x).
    """
    if fe.n == 0:
        return np.zeros((2, 2), dtype=complex)
    hs = fe.halfspins0
    system = np.conj(fe.X0) + t * adjoint(fe.L0) - x * np.eye(fe.n)
    resolvent_e = _solve(system, np.conj(hs.e_rows), f"t={t}, x={x}")
    return -np.conj(hs.xi_rows).T @ resolvent_e


def hardy_basis_matrix(fe: FrozenEvolution) -> np.ndarray:
    """Matrix of G (adjoint of multiplication by x) on the rational basis: X̄(0)."""
    return np.conj(fe.X0)


def toeplitz_matrix(fe: FrozenEvolution) -> np.ndarray:
    """Matrix 𝓛 = -L(0)* of the Toeplitz operator T_{U₀} on the same basis."""
    return -adjoint(fe.L0)


def hardy_rep_pi_plus(fe: FrozenEvolution, t: float, x: float) -> np.ndarray:
    """
    (1/2iπ) I₊[(G - t T_{U₀} - x)⁻¹ Π₊M₀] in the finite rational basis,
    evaluated with the literal doubled 2N×2N matrices:
        -Tᵀ 𝓕₀* 𝓗 [[G] - t[𝓛] - x I]⁻¹ 𝓔₀* T
    """
    n = fe.n
    if n == 0:
        return np.zeros((2, 2), dtype=complex)
    hs = fe.halfspins0
    T = stack_T(n)
    operator = double(hardy_basis_matrix(fe)) - t * double(toeplitz_matrix(fe)) - x * np.eye(2 * n)
    contracted = _solve(operator, np.conj(hs.E_rond) @ T, f"t={t}, x={x}")
    return -T.T @ np.conj(hs.F_rond) @ block_H(n) @ contracted


def doubled_pi_minus(fe: FrozenEvolution, t: float, x: complex) -> np.ndarray:
    """Π₋M through the literal 2N×2N form -Tᵀ 𝓔₀ 𝓗 [X(0) + tL(0) - x]⁻¹ 𝓕₀ T."""
    n = fe.n
    if n == 0:
        return np.zeros((2, 2), dtype=complex)
    hs = fe.halfspins0
    T = stack_T(n)
    operator = double(fe.matrix_at(t) - x * np.eye(n))
    contracted = _solve(operator, hs.F_rond @ T, f"t={t}, x={x}")
    return -T.T @ hs.E_rond @ block_H(n) @ contracted


def full_field(fe: FrozenEvolution, t: float, x: float, strict: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """
    M(t, x) = M₀ + Π₋M + Π₊M and its real spin vector m.

    Returns:
        (M, m) where m is real unless strict is off and the field is not real
    Raises:
        ResolventSingular, NonRealField
    """
    M = fe.M0 + pi_minus(fe, t, x) + pi_plus(fe, t, x)
    m = matrix_to_spin(M, fe.tolerances, strict=False)
    imag = float(np.max(np.abs(m.imag)))
    if imag > fe.tolerances.real_tol:
        if strict:
            raise NonRealField(f"imaginary residue {imag:.3e} at t={t}, x={x}")
        return M, m
    return M, m.real


def field_row(fe: FrozenEvolution, t: float, x: float) -> Dict[str, float]:
    """One (t, x) sample with sphere and reality diagnostics, never raising on singular points."""
    try:
        M, m = full_field(fe, t, x, strict=False)
    except ResolventSingular:
        nan = float("nan")
        return {"t": t, "x": x, "m1": nan, "m2": nan, "m3": nan, "norm_defect": nan,
                "im_residual": nan, "singular": True}
    m_real = np.real(m)
    return {
        "t": t,
        "x": x,
        "m1": float(m_real[0]),
        "m2": float(m_real[1]),
        "m3": float(m_real[2]),
        "norm_defect": float(np.linalg.norm(m_real) - 1.0),
        "im_residual": float(np.max(np.abs(np.imag(m)))),
        "singular": False,
    }


@dataclass(frozen=True, eq=False)
class PoleSnapshot:
    """Poles x_j(t) and spin matrices A_j(t) recovered from the formula."""
    t: float
    poles: np.ndarray
    spins: np.ndarray          # (N, 2, 2)
    conditioning: float

    @property
    def n(self) -> int:
        return int(self.poles.shape[0])

    def spin_vectors(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros((0, 3), dtype=complex)
        return matrix_to_spin(self.spins, strict=False)

    def to_data(self, m0: ArrayLike) -> RationalData:
        return RationalData(np.asarray(m0), self.poles, self.spin_vectors())


def poles_and_spins_at(fe: FrozenEvolution, t: float) -> PoleSnapshot:
    """
    Eigen-decompose X(0) + tL(0) = P D P⁻¹; A_m(t) = Σ_jk P_jm (P⁻¹)_mk E_j H F_k.

    Raises:
        DefectiveMatrix: if cond(P) exceeds the configured threshold
    Warns:
        BoundaryApproachWarning: if min Im x_j(t) < boundary_imag
    """
    tol = fe.tolerances
    n = fe.n
    hs = fe.halfspins0
    if n == 0:
        return PoleSnapshot(t, np.zeros(0, dtype=complex), np.zeros((0, 2, 2), dtype=complex), 1.0)

    matrix = fe.matrix_at(t)
    if np.count_nonzero(matrix - np.diag(np.diag(matrix))) == 0:
        # already diagonal (t = 0 or N = 1): exact, keeps input order
        poles = np.diag(matrix).copy()
        P = np.eye(n, dtype=complex)
        P_inv = P
        condition = 1.0
    else:
        poles, P = scipy.linalg.eig(matrix)
        condition = float(np.linalg.cond(P))
        if not np.isfinite(condition) or condition > tol.condition_threshold:
            raise DefectiveMatrix(
                f"eigenbasis condition {condition:.3e} at t={t} exceeds {tol.condition_threshold:.1e}",
                condition=condition,
            )
        P_inv = np.linalg.inv(P)

    left = P.T @ hs.e_rows        # row m: Σ_j P_jm e_j
    right = P_inv @ hs.xi_rows    # row m: Σ_k (P⁻¹)_mk ξ_k
    spins = np.einsum("ma,mb->mab", left, right)

    min_imag = float(np.min(poles.imag))
    if min_imag < tol.boundary_imag:
        warnings.warn(
            f"pole within {tol.boundary_imag:.1e} of the real axis at t={t} (min Im x = {min_imag:.3e})",
            BoundaryApproachWarning,
        )
        logger.warning(f"Boundary approach at t={t}: min Im x = {min_imag:.3e}")
    return PoleSnapshot(t=t, poles=poles, spins=spins, conditioning=condition)


def total_residue(snapshot: PoleSnapshot) -> np.ndarray:
    """Σ_j A_j(t), conserved along the flow."""
    return np.sum(snapshot.spins, axis=0) if snapshot.n else np.zeros((2, 2), dtype=complex)


def match_by_proximity(reference: ArrayLike, candidates: ArrayLike) -> np.ndarray:
    """
    Index array `idx` such that candidates[idx[j]] is assigned to reference[j].

    Minimal total distance assignment in ℂ; the reference is processed in
    lexicographic (Re, Im) order so ties resolve deterministically.
    """
    reference = np.asarray(reference, dtype=complex)
    candidates = np.asarray(candidates, dtype=complex)
    order = np.lexsort((reference.imag, reference.real))
    cost = np.abs(reference[order][:, None] - candidates[None, :])
    rows, cols = linear_sum_assignment(cost)
    idx = np.empty(reference.size, dtype=int)
    idx[order[rows]] = cols
    return idx


@dataclass(frozen=True)
class HalfWaveCoefficients:
    """Second-order pole coefficients of |∇|M: iA_j at x_j and -iA_j* at x̄_j."""
    upper_poles: np.ndarray
    upper_coefficients: np.ndarray   # (N, 2, 2)
    lower_poles: np.ndarray
    lower_coefficients: np.ndarray   # (N, 2, 2)

    def evaluate(self, x: complex) -> np.ndarray:
        """Σ c / (x - p)² over both pole families, as a 2x2 matrix."""
        value = np.zeros((2, 2), dtype=complex)
        for p, c in zip(self.upper_poles, self.upper_coefficients):
            value = value + c / (x - p) ** 2
        for p, c in zip(self.lower_poles, self.lower_coefficients):
            value = value + c / (x - p) ** 2
        return value


def halfwave_apply(data: RationalData) -> HalfWaveCoefficients:
    """|∇|M = i Σ A_j/(x - x_j)² - i Σ A_j*/(x - x̄_j)² in coefficient form."""
    A = spin_to_matrix(data.spins).reshape(-1, 2, 2)
    return HalfWaveCoefficients(
        upper_poles=np.array(data.poles, dtype=complex),
        upper_coefficients=1j * A,
        lower_poles=np.conj(data.poles),
        lower_coefficients=-1j * adjoint(A),
    )


def fourier_halfwave(values: ArrayLike, dx: float) -> np.ndarray:
    """Numerical |ξ| multiplier on a uniform periodic grid (last axis)."""
    values = np.asarray(values)
    xi = 2.0 * np.pi * np.fft.fftfreq(values.shape[-1], d=dx)
    return np.fft.ifft(np.abs(xi) * np.fft.fft(values, axis=-1), axis=-1)


def pde_residual(fe: FrozenEvolution, t: float, x: float, h: float) -> float:
    """
    ‖(M(t+h, x) - M(t-h, x))/2h + (i/2)[M(t, x), |∇|M(t, x)]‖, with |∇|M from
    the closed form at the snapshot of time t.
    """
    M_plus, _ = full_field(fe, t + h, x, strict=False)
    M_minus, _ = full_field(fe, t - h, x, strict=False)
    M, _ = full_field(fe, t, x, strict=False)

    snapshot = poles_and_spins_at(fe, t)
    coefficients = halfwave_apply(snapshot.to_data(fe.m0))
    K = coefficients.evaluate(x)

    dM_dt = (M_plus - M_minus) / (2.0 * h)
    return float(np.linalg.norm(dM_dt - (-0.5j) * commutator(M, K)))
