"""
Tests for the RK4 oracle and the formula-vs-oracle comparison
tests/test_ode_oracle.py
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.modules.algebra.halfspin import HalfSpinSet
from src.modules.algebra.spin_algebra import commutator, dot, spin_to_matrix
from src.modules.dynamics.constraints import single_soliton, validate
from src.modules.dynamics.lax import lax_series
from src.modules.evolution.explicit_formula import (
    create_frozen_evolution, match_by_proximity, poles_and_spins_at,
)
from src.modules.oracle.ode_oracle import (
    HalfSpinState, SpinCMState, compare, integrate_halfspin, integrate_propagator,
    integrate_spin_cm, rhs_halfspin_eqtemps, rhs_halfspin_sys1, rhs_spin_cm, rk4_step,
)
from src.modules.utils.errors import BoundaryApproach, PoleCollision, ValidationFailed


def random_state(rng, n):
    x = 3.0 * np.arange(n) + rng.normal(size=n) + 1j * (1 + rng.uniform(size=n))
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    s = rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))
    return x, v, s


def test_rk4_step_is_exact_for_cubic():
    # y' = 3t² integrates exactly under RK4
    y = rk4_step(lambda t, y: np.array([3 * t ** 2]), 0.5, np.array([0.0]), 0.25)
    assert y[0] == pytest.approx(0.75 ** 3 - 0.5 ** 3)


def test_rhs_single_site_vanishes(rng):
    x, v, s = random_state(rng, 1)
    x_dot, v_dot, s_dot = rhs_spin_cm(SpinCMState(0.0, x, v, s))
    assert_allclose(x_dot, v)
    assert_allclose(v_dot, 0)
    assert_allclose(s_dot, 0)


def test_rhs_static_soliton(static_soliton):
    state = SpinCMState(0.0, static_soliton.poles, np.zeros(1, dtype=complex), static_soliton.spins)
    derivatives = rhs_spin_cm(state)
    for d in derivatives:
        assert_allclose(d, 0, atol=1e-15)


def test_rhs_matrix_form(rng):
    x, v, s = random_state(rng, 4)
    _, v_dot, s_dot = rhs_spin_cm(SpinCMState(0.0, x, v, s))
    A = spin_to_matrix(s)
    for j in range(4):
        expected = sum(commutator(A[j], A[k]) / (x[j] - x[k]) ** 2 for k in range(4) if k != j)
        assert_allclose(spin_to_matrix(s_dot[j]), expected, atol=1e-12)
        accel = -4 * sum(dot(s[j], s[k]) / (x[j] - x[k]) ** 3 for k in range(4) if k != j)
        assert v_dot[j] == pytest.approx(accel)


def test_rhs_pole_collision(rng):
    _, v, s = random_state(rng, 2)
    with pytest.raises(PoleCollision):
        rhs_spin_cm(SpinCMState(0.0, np.array([1j, 1j]), v, s))


def test_halfspin_right_hand_sides_agree(rng):
    for n in (2, 3, 5):
        x, v, _ = random_state(rng, n)
        pairs = HalfSpinSet.from_arrays(rng.normal(size=n) + 1j * rng.normal(size=n),
                                        rng.normal(size=n) + 1j * rng.normal(size=n))
        state = HalfSpinState(0.0, x, v, pairs)
        loop = rhs_halfspin_sys1(state)
        matrix = rhs_halfspin_eqtemps(state)
        assert_allclose(loop[0], matrix[0], atol=1e-12)
        assert_allclose(loop[1], matrix[1], atol=1e-12)


def test_static_trajectory_is_constant(static_soliton):
    trajectory = integrate_spin_cm(static_soliton, 1.0, 1e-2)
    assert len(trajectory.times) == 101
    assert_allclose(trajectory.poles, 1j, atol=1e-14)
    assert_allclose(trajectory.spins - static_soliton.spins, 0, atol=1e-14)
    assert trajectory.richardson_error < 1e-14

    halfspin = integrate_halfspin(static_soliton, 1.0, 1e-2, richardson=False)
    assert_allclose(halfspin.halfspins[-1].alphas, halfspin.halfspins[0].alphas, atol=1e-14)


def test_traveling_soliton_moves_linearly(traveling_soliton):
    trajectory = integrate_spin_cm(traveling_soliton, 1.0, 1e-2, richardson=False)
    assert_allclose(trajectory.poles[:, 0], traveling_soliton.poles[0] + 0.6 * trajectory.times, atol=1e-12)


def test_step_is_adjusted_to_land_on_t1(static_soliton):
    trajectory = integrate_spin_cm(static_soliton, 0.1, 0.03, richardson=False)
    assert trajectory.times[-1] == pytest.approx(0.1)
    assert len(trajectory.times) == 4
    assert trajectory.index_of(trajectory.times[2]) == 2
    with pytest.raises(ValueError):
        trajectory.index_of(0.05)


def test_integration_guards(static_soliton):
    invalid = static_soliton.with_spins(np.array([[1.0, 0.0, 0.0]]))
    with pytest.raises(ValidationFailed):
        integrate_spin_cm(invalid, 0.1, 1e-2)
    with pytest.raises(BoundaryApproach):
        integrate_spin_cm(single_soliton(5e-7j), 0.1, 1e-2, richardson=False)


def test_compare_static_soliton(static_soliton):
    fe = create_frozen_evolution(static_soliton)
    trajectory = integrate_spin_cm(static_soliton, 1.0, 0.1, richardson=False)
    report = compare(fe, trajectory, [0.0, 0.5, 1.0], np.linspace(-10, 10, 21))
    assert len(report.rows) == 3
    assert report.sup_error < 1e-13
    assert report.pole_error < 1e-13
    assert report.spin_error < 1e-13


@pytest.mark.slow
def test_formula_matches_oracle(two_soliton_set):
    times = np.linspace(0.0, 1.0, 11)
    xs = np.linspace(-10.0, 10.0, 201)
    for data in two_soliton_set:
        fe = create_frozen_evolution(data)
        trajectory = integrate_spin_cm(data, 1.0, 1e-3)
        report = compare(fe, trajectory, times, xs)
        assert report.sup_error < 1e-6
        assert report.pole_error < 1e-6
        assert report.spin_error < 1e-6
        assert report.max_norm_defect < 1e-8
        assert report.max_im_residual < 1e-8
        assert trajectory.richardson_error < 1e-8


@pytest.mark.slow
def test_poles_at_half_time_match_eigenvalues(two_soliton):
    fe = create_frozen_evolution(two_soliton)
    trajectory = integrate_spin_cm(two_soliton, 0.5, 1e-3, richardson=False)
    snapshot = poles_and_spins_at(fe, 0.5)
    idx = match_by_proximity(trajectory.poles[-1], snapshot.poles)
    assert_allclose(snapshot.poles[idx], trajectory.poles[-1], atol=1e-6)
    assert_allclose(snapshot.spin_vectors()[idx], trajectory.spins[-1], atol=1e-6)


@pytest.mark.slow
def test_two_oracles_agree(two_soliton_set):
    for data in two_soliton_set:
        spin_level = integrate_spin_cm(data, 1.0, 1e-3, richardson=False)
        halfspin_level = integrate_halfspin(data, 1.0, 1e-3, richardson=False)
        assert_allclose(halfspin_level.poles, spin_level.poles, atol=1e-6)
        assert_allclose(halfspin_level.spins, spin_level.spins, atol=1e-6)


@pytest.mark.slow
def test_constraints_persist_along_flow(two_soliton):
    trajectory = integrate_spin_cm(two_soliton, 1.0, 1e-3, richardson=False)
    for idx in range(0, len(trajectory.times), 100):
        datum = trajectory.datum_at(idx)
        assert np.max(np.abs(dot(datum.spins, datum.spins))) < 1e-8
        report = validate(datum)
        assert np.max(report.anticomm_residuals) < 1e-8


@pytest.mark.slow
def test_propagator_transport_and_conjugation(two_soliton):
    trajectory = integrate_spin_cm(two_soliton, 1.0, 1e-3, richardson=False)
    series = integrate_propagator(trajectory)
    assert_allclose(series.at(0).U, np.eye(2))
    assert series.max_orthogonality_defect() < 1e-6

    U = series.at(-1).U
    U_inv = np.linalg.inv(U)
    start, end = trajectory.halfspins[0], trajectory.halfspins[-1]
    assert np.max(np.abs(end.e_rows - U @ start.e_rows)) < 1e-6
    assert np.max(np.abs(end.xi_rows - U @ start.xi_rows)) < 1e-6

    laxes = lax_series(trajectory)
    assert_allclose(laxes[-1].L, U @ laxes[0].L @ U_inv, atol=1e-6)
    fe = create_frozen_evolution(two_soliton)
    assert_allclose(U @ fe.matrix_at(1.0) @ U_inv, np.diag(trajectory.poles[-1]), atol=1e-6)


def _final_pole_error(fe, data, h):
    trajectory = integrate_spin_cm(data, 1.0, h, richardson=False)
    snapshot = poles_and_spins_at(fe, 1.0)
    idx = match_by_proximity(trajectory.poles[-1], snapshot.poles)
    return float(np.max(np.abs(snapshot.poles[idx] - trajectory.poles[-1])))


@pytest.mark.slow
def test_oracle_converges_at_fourth_order(two_soliton):
    fe = create_frozen_evolution(two_soliton)
    coarse = _final_pole_error(fe, two_soliton, 0.05)
    fine = _final_pole_error(fe, two_soliton, 0.025)
    assert fine > 1e-13
    assert 12.0 <= coarse / fine <= 20.0


@pytest.mark.slow
def test_compare_is_insensitive_to_halving_the_step(two_soliton):
    fe = create_frozen_evolution(two_soliton)
    times, xs = [0.0, 0.5, 1.0], np.linspace(-10.0, 10.0, 41)
    errors = []
    for h in (1e-3, 5e-4):
        trajectory = integrate_spin_cm(two_soliton, 1.0, h, richardson=False)
        errors.append(compare(fe, trajectory, times, xs).sup_error)
    assert max(errors) < 1e-8
    assert abs(errors[0] - errors[1]) < 1e-8
