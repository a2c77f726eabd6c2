"""
Tests for the Lax pair, sign reconciliation and isospectral diagnostics
tests/test_lax.py
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.modules.algebra.spin_algebra import dot
from src.modules.datasets.rational_data import RationalData
from src.modules.dynamics.constraints import initial_velocities
from src.modules.dynamics.lax import (
    build_lax, char_poly_coefficients, conserved_traces, lax_residual, lax_series,
    matsuno_consistency, matsuno_lax, pole_center, spectrum_drift,
)
from src.modules.oracle.ode_oracle import integrate_spin_cm
from src.modules.utils.errors import OrthogonalSpins


def test_static_soliton_lax_pair_vanishes(static_soliton):
    lax = build_lax(static_soliton)
    assert_allclose(lax.L, [[0]], atol=1e-15)
    assert_allclose(lax.B, [[0]], atol=1e-15)
    assert conserved_traces(lax.L, 4) == pytest.approx([0, 0, 0, 0], abs=1e-15)


def test_lax_pair_structure(two_soliton):
    lax = build_lax(two_soliton)
    x, s = two_soliton.poles, two_soliton.spins
    assert_allclose(lax.B.T, -lax.B, atol=1e-15)
    assert_allclose(np.diag(lax.L), initial_velocities(two_soliton), atol=1e-14)
    d = x[0] - x[1]
    assert lax.L[1, 0] * (x[1] - x[0]) == pytest.approx(-lax.L[0, 1] * d)
    assert lax.L[0, 1] * d == pytest.approx(lax.B[0, 1] * d ** 2)
    assert lax.L[0, 1] ** 2 == pytest.approx(-2 * dot(s[0], s[1]) / d ** 2, rel=1e-10)


def test_trace_of_l_is_sum_of_velocities(two_soliton):
    lax = build_lax(two_soliton)
    assert conserved_traces(lax.L, 1)[0] == pytest.approx(np.sum(lax.velocities))
    with pytest.raises(ValueError):
        conserved_traces(lax.L, 0)


def test_char_poly_matches_eigenvalues(two_soliton):
    L = build_lax(two_soliton).L
    coefficients = char_poly_coefficients(L)
    assert coefficients[0] == 1
    assert coefficients[1] == pytest.approx(-np.trace(L))
    assert coefficients[2] == pytest.approx(np.linalg.det(L))


def test_pole_center_moves_linearly(two_soliton):
    lax = build_lax(two_soliton)
    X0 = np.diag(two_soliton.poles)
    assert pole_center(X0, lax.L, 0.0) == pytest.approx(np.sum(two_soliton.poles))
    assert pole_center(X0, lax.L, 2.0) == pytest.approx(np.sum(two_soliton.poles) + 2 * np.sum(lax.velocities))


def test_matsuno_reconciliation(two_soliton_set):
    for data in two_soliton_set:
        eps = matsuno_consistency(data)
        assert abs(eps[0, 1]) == pytest.approx(1, abs=1e-10)
        assert abs(eps[1, 0]) == pytest.approx(1, abs=1e-10)
        assert eps[0, 1] * eps[1, 0] == pytest.approx(-1, abs=1e-10)
        lax = build_lax(data)
        assert_allclose(matsuno_lax(data, eps, lax.velocities), lax.L, atol=1e-10)


def test_matsuno_single_site(static_soliton):
    eps = matsuno_consistency(static_soliton)
    assert eps.shape == (1, 1)
    assert eps[0, 0] == 0


def test_matsuno_orthogonal_spins():
    data = RationalData(np.array([0.0, 0.0, 1.0]), np.array([1j, 3 + 1j]),
                        np.array([[1, 1j, 0], [1, 1j, 0]], dtype=complex))
    with pytest.raises(OrthogonalSpins) as excinfo:
        matsuno_consistency(data)
    assert (0, 1) in excinfo.value.pairs
    eps = matsuno_consistency(data, strict=False)
    assert np.isnan(eps[0, 1]) and np.isnan(eps[1, 0])


def test_static_soliton_lax_residual(static_soliton):
    trajectory = integrate_spin_cm(static_soliton, 0.1, 1e-2, richardson=False)
    assert lax_residual(trajectory, 2e-2) < 1e-14


def test_lax_residual_rejects_off_grid_step(static_soliton):
    trajectory = integrate_spin_cm(static_soliton, 0.1, 1e-2, richardson=False)
    with pytest.raises(ValueError):
        lax_residual(trajectory, 1.5e-2)


@pytest.mark.slow
def test_isospectrality_along_oracle(two_soliton_set):
    for data in two_soliton_set:
        trajectory = integrate_spin_cm(data, 1.0, 1e-3, richardson=False)
        drift = spectrum_drift(lax_series(trajectory), kmax=4)
        assert drift["trace_drift"] < 1e-8
        assert drift["charpoly_drift"] < 1e-8


@pytest.mark.slow
def test_lax_residual_is_second_order(two_soliton):
    trajectory = integrate_spin_cm(two_soliton, 0.3, 1e-3, richardson=False)
    coarse = lax_residual(trajectory, 0.02, margin=0.02)
    fine = lax_residual(trajectory, 0.01, margin=0.02)
    assert 3.5 <= coarse / fine <= 4.5


@pytest.mark.slow
def test_lax_residual_does_not_vanish_for_invalid_data(two_soliton, rng):
    perturbed = two_soliton.with_spins(two_soliton.spins + 0.3 * (rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))))
    assert np.max(np.abs(dot(perturbed.spins, perturbed.spins))) > 1e-3
    trajectory = integrate_spin_cm(perturbed, 0.3, 1e-3, strict=False, richardson=False)
    coarse = lax_residual(trajectory, 0.02, margin=0.02)
    fine = lax_residual(trajectory, 0.01, margin=0.02)
    assert fine > 1e-4
    assert coarse / fine < 2.0
