"""
Constrained multi-soliton data generator
src/modules/datasets/generators.py

Best-effort helper producing valid N>=2 data:
1. seed poles on a line (spacing ~3, Im ~1) and spins from superposed single solitons
2. solve s_j·s_j = 0, s_j·β_j = 0 for the spins (poles fixed) with scipy least_squares
3. polish with minimum-norm Newton steps
4. accept only if the datum validates and its explicit-formula poles stay clear
   of the real axis and of each other on [0, horizon]
Deterministic for a fixed seed.
"""

from typing import Optional, Tuple
import logging
import warnings

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import least_squares

from ..config.hwm_config import ToleranceConfig, DEFAULT_TOLERANCES
from ..dynamics.constraints import b_vector, pole_geometry, single_soliton, validate
from ..utils.errors import DefectiveMatrix, HWMError
from .rational_data import RationalData

logger = logging.getLogger(__name__)


def constraint_residuals(m0: np.ndarray, poles: np.ndarray, spins: np.ndarray) -> np.ndarray:
    """Complex residuals [s_j·s_j for all j, s_j·β_j for all j]."""
    data = RationalData(m0, poles, spins)
    n = data.n
    null = np.array([np.sum(data.spins[j] * data.spins[j]) for j in range(n)])
    anticomm = np.array([np.sum(data.spins[j] * b_vector(data, j)) for j in range(n)])
    return np.concatenate([null, anticomm])


def constraint_jacobian(m0: np.ndarray, poles: np.ndarray, spins: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Wirtinger parts (∂r/∂s, ∂r/∂s̄) of the residuals, each (2N, 3N).

        d(s_j·s_j) = 2 s_j·ds_j
        d(s_j·β_j) = β_j·ds_j + Σ_{k≠j} s_j·ds_k/(x_j - x_k)
                     + s_j·ds̄_j/(x_j - x̄_j) + Σ_{k≠j} s_j·ds̄_k/(x_j - x̄_k)
    """
    data = RationalData(m0, poles, spins)
    n = data.n
    x, s = data.poles, data.spins
    P = np.zeros((2 * n, 3 * n), dtype=complex)
    Q = np.zeros((2 * n, 3 * n), dtype=complex)
    for j in range(n):
        P[j, 3 * j:3 * j + 3] = 2.0 * s[j]
        row = n + j
        P[row, 3 * j:3 * j + 3] = b_vector(data, j)
        Q[row, 3 * j:3 * j + 3] = s[j] / (x[j] - np.conj(x[j]))
        for k in range(n):
            if k == j:
                continue
            P[row, 3 * k:3 * k + 3] = s[j] / (x[j] - x[k])
            Q[row, 3 * k:3 * k + 3] = s[j] / (x[j] - np.conj(x[k]))
    return P, Q


def _pack(spins: np.ndarray) -> np.ndarray:
    flat = spins.reshape(-1)
    return np.concatenate([flat.real, flat.imag])


def _unpack(z: np.ndarray, n: int) -> np.ndarray:
    half = z.size // 2
    return (z[:half] + 1j * z[half:]).reshape(n, 3)


def _real_system(m0: np.ndarray, poles: np.ndarray, n: int):
    def residual(z):
        r = constraint_residuals(m0, poles, _unpack(z, n))
        return np.concatenate([r.real, r.imag])

    def jacobian(z):
        P, Q = constraint_jacobian(m0, poles, _unpack(z, n))
        J = np.hstack([P + Q, 1j * (P - Q)])
        return np.vstack([J.real, J.imag])

    return residual, jacobian


def solve_constraints(m0: ArrayLike, poles: ArrayLike, seed_spins: ArrayLike,
                      polish_steps: int = 20, target: float = 1e-14) -> np.ndarray:
    """Spins near `seed_spins` satisfying the constraints for fixed poles."""
    m0 = np.real(np.asarray(m0, dtype=complex))
    poles = np.asarray(poles, dtype=complex)
    seed_spins = np.asarray(seed_spins, dtype=complex).reshape(-1, 3)
    n = poles.size
    residual, jacobian = _real_system(m0, poles, n)

    result = least_squares(residual, _pack(seed_spins), jac=jacobian, method="trf",
                           xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
    z = result.x
    for _ in range(polish_steps):
        r = residual(z)
        if np.max(np.abs(r)) < target:
            break
        step, *_ = np.linalg.lstsq(jacobian(z), -r, rcond=None)
        z = z + step
    logger.debug(f"Constraint solve: max residual {np.max(np.abs(residual(z))):.3e} after {result.nfev} evaluations")
    return _unpack(z, n)


def seed_datum(n: int, rng: np.random.Generator, m0: ArrayLike = (0.0, 0.0, 1.0),
               spacing: float = 3.0) -> RationalData:
    """Poles on a line with jitter, spins of independent single solitons."""
    offsets = spacing * (np.arange(n) - 0.5 * (n - 1))
    re = offsets + rng.normal(0.0, 0.3, size=n)
    im = 1.0 + rng.uniform(-0.3, 0.3, size=n)
    poles = re + 1j * im
    spins = np.array([
        single_soliton(x, m0, phase=rng.uniform(0.0, 2 * np.pi), velocity=rng.uniform(-0.3, 0.3)).spins[0]
        for x in poles
    ])
    return RationalData(m0, poles, spins)


def clear_on_horizon(data: RationalData, horizon: float, margin: float,
                     tol: Optional[ToleranceConfig] = None, samples: int = 11) -> bool:
    """True if the eigenvalues of X(0) + tL(0) keep Im > margin and stay apart on [0, horizon]."""
    from ..evolution.explicit_formula import create_frozen_evolution, poles_and_spins_at

    tol = tol or DEFAULT_TOLERANCES
    fe = create_frozen_evolution(data, tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for t in np.linspace(0.0, horizon, samples):
            try:
                snapshot = poles_and_spins_at(fe, float(t))
            except DefectiveMatrix:
                return False
            min_sep, min_imag = pole_geometry(snapshot.poles)
            if min_imag <= margin or min_sep <= margin:
                return False
    return True


def generate_multi_soliton(n: int, seed: int = 0, horizon: float = 1.0, margin: float = 0.2,
                           m0: ArrayLike = (0.0, 0.0, 1.0), max_attempts: int = 50,
                           tol: Optional[ToleranceConfig] = None) -> RationalData:
    """
    Valid N-pole datum whose flow stays well inside the upper half-plane.

    Attempt a uses the random stream seeded by (seed, a).

    Raises:
        HWMError: if no attempt produced an acceptable datum
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    tol = tol or DEFAULT_TOLERANCES
    m0 = np.real(np.asarray(m0, dtype=complex))

    for attempt in range(max_attempts):
        rng = np.random.default_rng([seed, attempt])
        seed_data = seed_datum(n, rng, m0)
        if n == 1:
            candidate = seed_data
        else:
            try:
                spins = solve_constraints(m0, seed_data.poles, seed_data.spins)
            except (np.linalg.LinAlgError, ValueError) as e:
                logger.debug(f"Attempt {attempt}: solver failed ({e})")
                continue
            candidate = RationalData(m0, seed_data.poles, spins)

        report = validate(candidate, tol)
        if not report.valid:
            logger.debug(f"Attempt {attempt}: rejected, {report.failures()[:2]}")
            continue
        if np.min(report.spin_norms) < 0.1:
            logger.debug(f"Attempt {attempt}: rejected, spin collapsed to {np.min(report.spin_norms):.3e}")
            continue
        try:
            if not clear_on_horizon(candidate, horizon, margin, tol):
                logger.debug(f"Attempt {attempt}: rejected, poles leave the safe region before t={horizon}")
                continue
        except HWMError as e:
            logger.debug(f"Attempt {attempt}: rejected ({e})")
            continue

        logger.info(f"Generated valid N={n} datum (seed={seed}, attempt={attempt})")
        metadata = {"generator": "multi_soliton", "seed": int(seed), "attempt": attempt,
                    "horizon": float(horizon), "margin": float(margin)}
        return RationalData(m0, candidate.poles, candidate.spins, metadata)

    raise HWMError(f"no valid N={n} datum found in {max_attempts} attempts (seed={seed})")
