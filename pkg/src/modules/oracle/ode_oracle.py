"""
Brute-force ODE oracle for the spin Calogero-Moser dynamics
src/modules/oracle/ode_oracle.py

Integrates, with fixed-step classical RK4 over complex states:
- the pole/spin system    ẍ_j = -4 Σ s_j·s_k/(x_j - x_k)³,  ṡ_j = 2i Σ s_j×s_k/(x_j - x_k)²
- the half-spin system    α̇ = Bα, β̇ = Bβ  (B the Lax matrix)
- the propagator          U̇ = B(t)U, U(0) = I

These are independent of the explicit resolvent formula and serve as its reference.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
from numpy.typing import ArrayLike
from tqdm import tqdm

from ..algebra.halfspin import HalfSpinSet, align_sequence, assemble, assemble_from_spins
from ..algebra.spin_algebra import cross, dot
from ..config.hwm_config import ToleranceConfig, DEFAULT_TOLERANCES
from ..datasets.rational_data import RationalData
from ..dynamics.constraints import initial_velocities, validate
from ..dynamics.lax import lax_matrices
from ..evolution.explicit_formula import (
    FrozenEvolution, full_field, match_by_proximity, poles_and_spins_at,
)
from ..utils.errors import BoundaryApproach, PoleCollision, ValidationFailed

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpinCMState:
    t: float
    x: np.ndarray
    v: np.ndarray
    s: np.ndarray          # (N, 3)

    @property
    def spins(self) -> np.ndarray:
        return self.s


@dataclass(frozen=True, eq=False)
class HalfSpinState:
    t: float
    x: np.ndarray
    v: np.ndarray
    pairs: HalfSpinSet

    @property
    def spins(self) -> np.ndarray:
        return self.pairs.spins()


@dataclass(frozen=True, eq=False)
class Propagator:
    t: float
    U: np.ndarray

    @property
    def orthogonality_defect(self) -> float:
        """‖UᵀU - I‖."""
        return float(np.linalg.norm(self.U.T @ self.U - np.eye(self.U.shape[0])))


# ---------------------------------------------------------------------------
# Right-hand sides
# ---------------------------------------------------------------------------

def _pole_differences(x: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    """x_j - x_k with the diagonal set to 1; raises on collisions."""
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    if x.size > 1:
        gaps = np.abs(diff)
        np.fill_diagonal(gaps, np.inf)
        min_gap = float(np.min(gaps))
        if min_gap < tol.separation_guard:
            raise PoleCollision(f"pole separation {min_gap:.3e} below guard {tol.separation_guard:.1e}")
    return diff


def _spin_cm_derivatives(x: np.ndarray, v: np.ndarray, s: np.ndarray,
                         tol: ToleranceConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = x.size
    diff = _pole_differences(x, tol)
    off = ~np.eye(n, dtype=bool)

    dots = dot(s[:, None, :], s[None, :, :]).reshape(n, n)
    v_dot = -4.0 * np.sum(np.where(off, dots / diff ** 3, 0.0), axis=1)

    crosses = cross(s[:, None, :], s[None, :, :]).reshape(n, n, 3)
    weights = np.where(off, 1.0 / diff ** 2, 0.0)
    s_dot = 2j * np.einsum("jk,jkc->jc", weights, crosses)
    return v.copy(), v_dot, s_dot


def rhs_spin_cm(state: SpinCMState, tol: Optional[ToleranceConfig] = None):
    """
    (ẋ, v̇, ṡ) of the pole/spin system.

    Raises:
        PoleCollision: if two poles are closer than the separation guard
    """
    tol = tol or DEFAULT_TOLERANCES
    x = np.asarray(state.x, dtype=complex)
    return _spin_cm_derivatives(x, np.asarray(state.v, dtype=complex),
                                np.asarray(state.s, dtype=complex).reshape(-1, 3), tol)


def rhs_halfspin_sys1(state: HalfSpinState, tol: Optional[ToleranceConfig] = None):
    """α̇_j = Σ_{k≠j} (ξ_j·e_k)/(x_j - x_k)² α_k, same for β; site-by-site form."""
    tol = tol or DEFAULT_TOLERANCES
    x = np.asarray(state.x, dtype=complex)
    _pole_differences(x, tol)
    pairs = state.pairs.pairs
    n = len(pairs)
    alpha_dot = np.zeros(n, dtype=complex)
    beta_dot = np.zeros(n, dtype=complex)
    for j in range(n):
        for k in range(n):
            if k == j:
                continue
            coupling = (pairs[j].beta * pairs[k].alpha - pairs[j].alpha * pairs[k].beta) / (x[j] - x[k]) ** 2
            alpha_dot[j] += coupling * pairs[k].alpha
            beta_dot[j] += coupling * pairs[k].beta
    return alpha_dot, beta_dot


def rhs_halfspin_eqtemps(state: HalfSpinState, tol: Optional[ToleranceConfig] = None):
    """(α̇, β̇) = B(t)(α, β), with B the Lax matrix; matrix form of the same system."""
    tol = tol or DEFAULT_TOLERANCES
    x = np.asarray(state.x, dtype=complex)
    _pole_differences(x, tol)
    B = lax_matrices(x, np.zeros_like(x), state.pairs).B
    return B @ state.pairs.alphas, B @ state.pairs.betas


def _lax_b(x: np.ndarray, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return lax_matrices(x, np.zeros_like(x), HalfSpinSet.from_arrays(alpha, beta)).B


# ---------------------------------------------------------------------------
# RK4 driver
# ---------------------------------------------------------------------------

def rk4_step(f: Callable[[float, np.ndarray], np.ndarray], t: float, y: np.ndarray, h: float) -> np.ndarray:
    """Classical fourth-order Runge-Kutta step; linear over ℂ."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _time_grid(t1: float, h: float) -> np.ndarray:
    if t1 < 0:
        raise ValueError(f"t1 must be non-negative, got {t1}")
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    n_steps = int(round(t1 / h))
    if t1 > 0 and n_steps == 0:
        n_steps = 1
    if n_steps and abs(t1 / n_steps - h) > 1e-12 * h:
        logger.warning(f"Step adjusted from {h} to {t1 / n_steps} to land on t1={t1}")
    return np.linspace(0.0, t1, n_steps + 1)


def _run_rk4(f, y0: np.ndarray, times: np.ndarray, n: int, tol: ToleranceConfig,
             progress: bool, desc: str) -> List[np.ndarray]:
    ys = [y0]
    y = y0
    steps = range(times.size - 1)
    for i in tqdm(steps, desc=desc, disable=not progress, leave=False):
        h = times[i + 1] - times[i]
        y = rk4_step(f, times[i], y, h)
        min_imag = float(np.min(y[:n].imag)) if n else np.inf
        if min_imag < tol.boundary_imag:
            raise BoundaryApproach(f"pole reached Im x = {min_imag:.3e} at t={times[i + 1]:.6g}")
        if not np.all(np.isfinite(y)):
            raise PoleCollision(f"non-finite state at t={times[i + 1]:.6g}")
        ys.append(y)
    return ys


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Trajectory:
    """Uniform-step oracle trajectory."""
    times: np.ndarray
    states: list
    h: float
    kind: str
    m0: np.ndarray
    richardson_error: Optional[float] = None

    @property
    def n(self) -> int:
        return int(np.asarray(self.states[0].x).size)

    @cached_property
    def poles(self) -> np.ndarray:
        return np.array([s.x for s in self.states], dtype=complex).reshape(len(self.states), -1)

    @cached_property
    def velocities(self) -> np.ndarray:
        return np.array([s.v for s in self.states], dtype=complex).reshape(len(self.states), -1)

    @cached_property
    def spins(self) -> np.ndarray:
        return np.array([s.spins for s in self.states], dtype=complex).reshape(len(self.states), -1, 3)

    @cached_property
    def halfspins(self) -> List[HalfSpinSet]:
        """Branch-continuous half-spins along the trajectory."""
        if self.kind == "halfspin":
            return [s.pairs for s in self.states]
        canonical = [assemble_from_spins(s.s, strict=False) for s in self.states]
        return align_sequence(canonical)

    def index_of(self, t: float) -> int:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"t={t} is not a sample time of the trajectory")
        return idx

    def datum_at(self, idx: int) -> RationalData:
        return RationalData(self.m0, self.poles[idx], self.spins[idx])

    def final_vector(self) -> np.ndarray:
        return np.concatenate([self.poles[-1], self.velocities[-1], self.spins[-1].reshape(-1)])


def _check_initial(data: RationalData, tol: ToleranceConfig, strict: bool):
    if not strict:
        return
    report = validate(data, tol)
    if not report.valid:
        raise ValidationFailed(f"datum violates constraints: {report.failures()}", report=report)


def integrate_spin_cm(data: RationalData, t1: float, h: float, tol: Optional[ToleranceConfig] = None,
                      strict: bool = True, richardson: bool = True, progress: bool = False) -> Trajectory:
    """
    RK4 trajectory of the pole/spin system on [0, t1], v(0) from the constraints.

    Raises:
        ValidationFailed (strict), PoleCollision, BoundaryApproach
    """
    tol = tol or DEFAULT_TOLERANCES
    _check_initial(data, tol, strict)
    n = data.n
    v0 = initial_velocities(data, tol, strict=strict)
    y0 = np.concatenate([data.poles, v0, data.spins.reshape(-1)]).astype(complex)

    def f(t, y):
        x, v, s = y[:n], y[n:2 * n], y[2 * n:].reshape(n, 3)
        x_dot, v_dot, s_dot = _spin_cm_derivatives(x, v, s, tol)
        return np.concatenate([x_dot, v_dot, s_dot.reshape(-1)])

    times = _time_grid(t1, h)
    logger.debug(f"Integrating spin CM system: N={n}, t1={t1}, h={h}, steps={times.size - 1}")
    ys = _run_rk4(f, y0, times, n, tol, progress, "spin-CM RK4")
    states = [SpinCMState(t, y[:n], y[n:2 * n], y[2 * n:].reshape(n, 3)) for t, y in zip(times, ys)]
    trajectory = Trajectory(times, states, float(times[1] - times[0]) if times.size > 1 else h,
                            "spin_cm", np.real(data.m0))

    if richardson and times.size > 1:
        fine = integrate_spin_cm(data, t1, h / 2, tol, strict=False, richardson=False)
        trajectory.richardson_error = float(np.max(np.abs(trajectory.final_vector() - fine.final_vector())) / 15.0)
        logger.info(f"Richardson estimate at t1={t1}: {trajectory.richardson_error:.3e}")
    return trajectory


def integrate_halfspin(data: RationalData, t1: float, h: float, tol: Optional[ToleranceConfig] = None,
                       strict: bool = True, richardson: bool = True, progress: bool = False) -> Trajectory:
    """
    RK4 trajectory of (x, v, α, β); pole accelerations reuse the pole/spin law
    with spins reconstructed from the pairs.
    """
    tol = tol or DEFAULT_TOLERANCES
    _check_initial(data, tol, strict)
    n = data.n
    pairs0 = assemble(data, tol, strict=strict)
    v0 = initial_velocities(data, tol, strict=strict)
    y0 = np.concatenate([data.poles, v0, pairs0.alphas, pairs0.betas]).astype(complex)

    def f(t, y):
        x, v = y[:n], y[n:2 * n]
        alpha, beta = y[2 * n:3 * n], y[3 * n:]
        pairs = HalfSpinSet.from_arrays(alpha, beta)
        _, v_dot, _ = _spin_cm_derivatives(x, v, pairs.spins(), tol)
        B = lax_matrices(x, v, pairs).B
        return np.concatenate([v, v_dot, B @ alpha, B @ beta])

    times = _time_grid(t1, h)
    logger.debug(f"Integrating half-spin system: N={n}, t1={t1}, h={h}, steps={times.size - 1}")
    ys = _run_rk4(f, y0, times, n, tol, progress, "half-spin RK4")
    states = [
        HalfSpinState(t, y[:n], y[n:2 * n], HalfSpinSet.from_arrays(y[2 * n:3 * n], y[3 * n:]))
        for t, y in zip(times, ys)
    ]
    trajectory = Trajectory(times, states, float(times[1] - times[0]) if times.size > 1 else h,
                            "halfspin", np.real(data.m0))

    if richardson and times.size > 1:
        fine = integrate_halfspin(data, t1, h / 2, tol, strict=False, richardson=False)
        trajectory.richardson_error = float(np.max(np.abs(trajectory.final_vector() - fine.final_vector())) / 15.0)
        logger.info(f"Richardson estimate at t1={t1}: {trajectory.richardson_error:.3e}")
    return trajectory


# ---------------------------------------------------------------------------
# Propagator
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class PropagatorSeries:
    times: np.ndarray
    propagators: List[Propagator]

    @property
    def U(self) -> np.ndarray:
        return np.array([p.U for p in self.propagators])

    def max_orthogonality_defect(self) -> float:
        return max(p.orthogonality_defect for p in self.propagators)

    def at(self, idx: int) -> Propagator:
        return self.propagators[idx]


def integrate_propagator(trajectory: Trajectory, progress: bool = False) -> PropagatorSeries:
    """
    U̇ = B(t)U along a trajectory, U(0) = I.

    B is rebuilt from the branch-continuous half-spins at each sample; RK4
    midpoints use cubic Hermite interpolation of (x, α, β) with derivatives
    ẋ = v and (α̇, β̇) = B(α, β).
    """
    n = trajectory.n
    hs = trajectory.halfspins
    x = trajectory.poles
    v = trajectory.velocities
    alphas = np.array([p.alphas for p in hs]).reshape(len(hs), n)
    betas = np.array([p.betas for p in hs]).reshape(len(hs), n)

    U = np.eye(n, dtype=complex)
    propagators = [Propagator(float(trajectory.times[0]), U)]
    B_next = _lax_b(x[0], alphas[0], betas[0])

    for i in tqdm(range(len(trajectory.times) - 1), desc="propagator", disable=not progress, leave=False):
        h = trajectory.times[i + 1] - trajectory.times[i]
        B0 = B_next
        B_next = _lax_b(x[i + 1], alphas[i + 1], betas[i + 1])

        a0_dot, a1_dot = B0 @ alphas[i], B_next @ alphas[i + 1]
        b0_dot, b1_dot = B0 @ betas[i], B_next @ betas[i + 1]
        x_mid = 0.5 * (x[i] + x[i + 1]) + h * (v[i] - v[i + 1]) / 8.0
        a_mid = 0.5 * (alphas[i] + alphas[i + 1]) + h * (a0_dot - a1_dot) / 8.0
        b_mid = 0.5 * (betas[i] + betas[i + 1]) + h * (b0_dot - b1_dot) / 8.0
        B_mid = _lax_b(x_mid, a_mid, b_mid)

        k1 = B0 @ U
        k2 = B_mid @ (U + 0.5 * h * k1)
        k3 = B_mid @ (U + 0.5 * h * k2)
        k4 = B_next @ (U + h * k3)
        U = U + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        propagators.append(Propagator(float(trajectory.times[i + 1]), U))

    series = PropagatorSeries(np.asarray(trajectory.times), propagators)
    logger.debug(f"Propagator orthogonality defect: {series.max_orthogonality_defect():.3e}")
    return series


# ---------------------------------------------------------------------------
# Formula vs oracle
# ---------------------------------------------------------------------------

@dataclass
class ComparisonReport:
    rows: List[Dict[str, float]] = field(default_factory=list)

    @property
    def sup_error(self) -> float:
        return max((r["sup_err"] for r in self.rows), default=0.0)

    @property
    def pole_error(self) -> float:
        return max((r["pole_err"] for r in self.rows), default=0.0)

    @property
    def spin_error(self) -> float:
        return max((r["spin_err"] for r in self.rows), default=0.0)

    @property
    def max_norm_defect(self) -> float:
        return max((r["norm_defect"] for r in self.rows), default=0.0)

    @property
    def max_im_residual(self) -> float:
        return max((r["im_residual"] for r in self.rows), default=0.0)


def compare(fe: FrozenEvolution, trajectory: Trajectory, times: Sequence[float],
            xs: ArrayLike, progress: bool = False) -> ComparisonReport:
    """
    Field, pole and spin errors between the explicit formula and the oracle.

    `times` must be sample times of the trajectory; `xs` are real points.
    """
    xs = np.asarray(xs, dtype=float)
    report = ComparisonReport()
    for t in tqdm(times, desc="oracle compare", disable=not progress, leave=False):
        idx = trajectory.index_of(t)
        datum = trajectory.datum_at(idx)
        oracle_field = datum.field_at(xs)

        sup_err = 0.0
        norm_defect = 0.0
        im_residual = 0.0
        for x, m_oracle in zip(xs, oracle_field):
            _, m_formula = full_field(fe, float(t), float(x), strict=False)
            sup_err = max(sup_err, float(np.linalg.norm(m_formula - m_oracle)))
            norm_defect = max(norm_defect, float(abs(np.linalg.norm(np.real(m_formula)) - 1.0)))
            im_residual = max(im_residual, float(np.max(np.abs(np.imag(m_formula)))))

        snapshot = poles_and_spins_at(fe, float(t))
        if snapshot.n:
            match = match_by_proximity(datum.poles, snapshot.poles)
            pole_err = float(np.max(np.abs(snapshot.poles[match] - datum.poles)))
            spin_err = float(np.max(np.linalg.norm(snapshot.spin_vectors()[match] - datum.spins, axis=-1)))
        else:
            pole_err = spin_err = 0.0

        report.rows.append({
            "t": float(t),
            "sup_err": sup_err,
            "pole_err": pole_err,
            "spin_err": spin_err,
            "norm_defect": norm_defect,
            "im_residual": im_residual,
        })
    logger.info(
        f"Formula vs oracle: sup field error {report.sup_error:.3e}, "
        f"pole error {report.pole_error:.3e}, spin error {report.spin_error:.3e}"
    )
    return report
