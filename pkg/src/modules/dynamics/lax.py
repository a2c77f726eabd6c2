"""
Lax pair of the pole dynamics in half-spin form
src/modules/dynamics/lax.py

    L_jj = ẋ_j,  L_jk = (ξ_j·e_k)/(x_j - x_k)
    B_jj = 0,    B_jk = (ξ_j·e_k)/(x_j - x_k)²

with L̇ = [B, L]. B is antisymmetric, so the propagator U̇ = BU stays complex
orthogonal and the spectrum of L is conserved.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence
import logging

import numpy as np
from numpy.typing import ArrayLike

from ..algebra.halfspin import HalfSpinSet, assemble, pairing_matrix
from ..algebra.spin_algebra import dot
from ..config.hwm_config import ToleranceConfig, DEFAULT_TOLERANCES
from ..datasets.rational_data import RationalData
from ..utils.errors import OrthogonalSpins
from .constraints import check_pole_geometry, initial_velocities

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LaxPair:
    L: np.ndarray
    B: np.ndarray
    velocities: np.ndarray

    @property
    def n(self) -> int:
        return int(self.L.shape[0])

    def commutator_residual(self, L_dot: ArrayLike) -> float:
        """‖L̇ - [B, L]‖ for a given derivative estimate."""
        return float(np.linalg.norm(np.asarray(L_dot) - (self.B @ self.L - self.L @ self.B)))


def _inverse_differences(poles: np.ndarray) -> np.ndarray:
    """1/(x_j - x_k) with zero on the diagonal."""
    diff = poles[:, None] - poles[None, :]
    np.fill_diagonal(diff, 1.0)
    inv = 1.0 / diff
    np.fill_diagonal(inv, 0.0)
    return inv


def lax_matrices(poles: ArrayLike, velocities: ArrayLike, halfspins: HalfSpinSet) -> LaxPair:
    """L and B from poles, velocities and (branch-consistent) half-spins."""
    poles = np.asarray(poles, dtype=complex).reshape(-1)
    velocities = np.asarray(velocities, dtype=complex).reshape(-1)
    inv = _inverse_differences(poles)
    P = pairing_matrix(halfspins)
    L = P * inv + np.diag(velocities)
    B = P * inv ** 2
    return LaxPair(L=L, B=B, velocities=velocities)


def build_lax(data: RationalData, tol: Optional[ToleranceConfig] = None, strict: bool = True,
              halfspins: Optional[HalfSpinSet] = None) -> LaxPair:
    """
    Lax pair at t=0 with L_jj = b_j from the constraint projection.

    Raises:
        NotNull, NotProportional, DegeneratePoles: propagated (strict only for the first two)
    """
    tol = tol or DEFAULT_TOLERANCES
    check_pole_geometry(data.poles, tol)
    if halfspins is None:
        halfspins = assemble(data, tol, strict=strict)
    velocities = initial_velocities(data, tol, strict=strict)
    return lax_matrices(data.poles, velocities, halfspins)


def matsuno_consistency(data: RationalData, tol: Optional[ToleranceConfig] = None, strict: bool = True,
                        halfspins: Optional[HalfSpinSet] = None) -> np.ndarray:
    """
    Signs ε with ε_{k,j} = (ξ_j·e_k)/√(-2 s_j·s_k), principal root.

    Entries where s_j·s_k vanishes are NaN (non-strict) or raise.

    Raises:
        OrthogonalSpins: if some off-diagonal s_j·s_k vanishes (strict only)
    """
    tol = tol or DEFAULT_TOLERANCES
    n = data.n
    if halfspins is None:
        halfspins = assemble(data, tol, strict=strict)
    P = pairing_matrix(halfspins)
    S = dot(data.spins[:, None, :], data.spins[None, :, :]).reshape(n, n)

    eps = np.zeros((n, n), dtype=complex)
    orthogonal = []
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            if abs(S[j, k]) <= tol.null_tol:
                orthogonal.append((j, k))
                eps[k, j] = np.nan
                continue
            eps[k, j] = P[j, k] / np.sqrt(-2.0 * S[j, k])

    if orthogonal and strict:
        raise OrthogonalSpins(f"s_j·s_k vanishes for pairs {orthogonal}", pairs=orthogonal)
    return eps


def matsuno_lax(data: RationalData, eps: np.ndarray, velocities: ArrayLike) -> np.ndarray:
    """L in square-root form: L_jk = ε_{k,j} √(-2 s_j·s_k)/(x_j - x_k)."""
    n = data.n
    S = dot(data.spins[:, None, :], data.spins[None, :, :]).reshape(n, n)
    roots = np.sqrt(-2.0 * S)
    L = eps.T * roots * _inverse_differences(data.poles)
    return L + np.diag(np.asarray(velocities, dtype=complex))


def conserved_traces(L: ArrayLike, kmax: int) -> List[complex]:
    """[Tr L, Tr L², ..., Tr L^kmax]."""
    if kmax < 1:
        raise ValueError(f"kmax must be >= 1, got {kmax}")
    L = np.asarray(L, dtype=complex)
    traces = []
    power = np.eye(L.shape[0], dtype=complex)
    for _ in range(kmax):
        power = power @ L
        traces.append(complex(np.trace(power)))
    return traces


def char_poly_coefficients(L: ArrayLike) -> np.ndarray:
    """Coefficients of det(λI - L), leading 1 first."""
    L = np.asarray(L, dtype=complex)
    if L.shape[0] == 0:
        return np.ones(1, dtype=complex)
    return np.poly(L).astype(complex)


def pole_center(X0: ArrayLike, L0: ArrayLike, t: float) -> complex:
    """Tr X(t) = Tr X(0) + t Tr L(0): the pole center of mass moves linearly."""
    return complex(np.trace(np.asarray(X0)) + t * np.trace(np.asarray(L0)))


def lax_series(trajectory) -> List[LaxPair]:
    """Lax pairs along a trajectory exposing times/poles/velocities/halfspins."""
    return [
        lax_matrices(x, v, hs)
        for x, v, hs in zip(trajectory.poles, trajectory.velocities, trajectory.halfspins)
    ]


def lax_residual(trajectory, h: float, margin: float = 0.0) -> float:
    """
    max_t ‖(L(t+h) - L(t-h))/2h - [B(t), L(t)]‖ over the trajectory samples.

    `h` must be a whole multiple of the trajectory step; only t with
    [t - h, t + h] inside the trajectory and at least `margin` away from its
    ends are used.
    """
    times = np.asarray(trajectory.times)
    if times.size < 3:
        raise ValueError("lax_residual needs at least 3 trajectory samples")
    dt = times[1] - times[0]
    stride = int(round(h / dt))
    if stride < 1 or abs(stride * dt - h) > 1e-9 * max(1.0, abs(h)):
        raise ValueError(f"h={h} is not a whole multiple of the trajectory step {dt}")

    pairs = lax_series(trajectory)
    worst = 0.0
    for idx in range(stride, times.size - stride):
        t = times[idx]
        if t - times[0] < margin - 1e-12 or times[-1] - t < margin - 1e-12:
            continue
        L_dot = (pairs[idx + stride].L - pairs[idx - stride].L) / (2.0 * stride * dt)
        worst = max(worst, pairs[idx].commutator_residual(L_dot))
    logger.debug(f"Lax residual at h={h:.3e}: {worst:.3e}")
    return worst


def spectrum_drift(lax_pairs: Sequence[LaxPair], kmax: Optional[int] = None) -> dict:
    """Max relative drift of power traces and characteristic-polynomial coefficients."""
    if not lax_pairs:
        return {"trace_drift": 0.0, "charpoly_drift": 0.0}
    n = lax_pairs[0].n
    kmax = kmax or max(1, 2 * n)
    base_traces = np.array(conserved_traces(lax_pairs[0].L, kmax))
    base_poly = char_poly_coefficients(lax_pairs[0].L)
    trace_drift = 0.0
    poly_drift = 0.0
    for lp in lax_pairs[1:]:
        traces = np.array(conserved_traces(lp.L, kmax))
        poly = char_poly_coefficients(lp.L)
        trace_drift = max(trace_drift, float(np.max(np.abs(traces - base_traces) / np.maximum(1.0, np.abs(base_traces)))))
        poly_drift = max(poly_drift, float(np.max(np.abs(poly - base_poly) / np.maximum(1.0, np.abs(base_poly)))))
    return {"trace_drift": trace_drift, "charpoly_drift": poly_drift}
