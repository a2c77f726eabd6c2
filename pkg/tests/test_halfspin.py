"""
Tests for canonical half-spins and the doubled-matrix calculus
tests/test_halfspin.py
"""

import numpy as np
import pytest
from hypothesis import assume, example, given, settings, strategies as st
from numpy.testing import assert_allclose

from src.modules.algebra.halfspin import (
    H, HalfSpinPair, HalfSpinSet, align_branches, align_sequence, assemble_from_spins, block_H,
    block_diag_constant, canonical_halfspins, double, halfspin_to_matrix, pairing, pairing_matrix,
    sep_residual, stack_T,
)
from src.modules.algebra.spin_algebra import dot, spin_to_matrix
from src.modules.utils.errors import NotNull

complex_entry = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)


def null_spin_from(alpha, beta):
    return HalfSpinPair(alpha, beta).to_spin()


null_spin = st.tuples(complex_entry, complex_entry).map(lambda ab: null_spin_from(*ab))
matrix3 = st.lists(complex_entry, min_size=9, max_size=9).map(lambda v: np.array(v).reshape(3, 3))


@pytest.mark.parametrize("s, alpha, beta", [
    ((1, 1j, 0), 1j * np.sqrt(2), 0),
    ((1, -1j, 0), 0, np.sqrt(2)),
    ((1, 0, 1j), 1j, 1),
])
def test_canonical_examples(s, alpha, beta):
    p = canonical_halfspins(np.array(s, dtype=complex))
    assert p.alpha == pytest.approx(alpha, abs=1e-14)
    assert p.beta == pytest.approx(beta, abs=1e-14)
    assert p.alpha * p.beta == pytest.approx(s[2], abs=1e-14)


def test_canonical_rejects_non_null():
    with pytest.raises(NotNull):
        canonical_halfspins(np.array([1.0, 0.0, 0.0]))
    # the non-strict path still returns a pair
    p = canonical_halfspins(np.array([1.0, 0.0, 0.0]), strict=False)
    assert isinstance(p, HalfSpinPair)


def test_halfspin_to_matrix_examples():
    assert_allclose(halfspin_to_matrix(HalfSpinPair(0j, 0j)), np.zeros((2, 2)))
    assert_allclose(halfspin_to_matrix(HalfSpinPair(1j * np.sqrt(2), 0j)), [[0, 2], [0, 0]], atol=1e-15)
    M = halfspin_to_matrix(HalfSpinPair(0.3 + 1j, -2 + 0.5j))
    assert np.trace(M) == pytest.approx(0)


@settings(max_examples=500, deadline=None)
@given(null_spin)
@example(null_spin_from(1e-8, 1.0))
@example(null_spin_from(1.0, 1e-8))
@example(null_spin_from(3e-7 - 1e-7j, -2.5 + 0.5j))
def test_reconstruction(s):
    p = canonical_halfspins(s, strict=False)
    assert_allclose(p.to_matrix(), spin_to_matrix(s), atol=1e-10)
    assert -p.alpha ** 2 == pytest.approx(s[0] - 1j * s[1], abs=1e-10)
    assert p.beta ** 2 == pytest.approx(s[0] + 1j * s[1], abs=1e-10)
    assert p.alpha * p.beta == pytest.approx(s[2], abs=1e-10)


def test_pairing_examples():
    hs = assemble_from_spins(np.array([[1, 1j, 0], [1, -1j, 0]], dtype=complex))
    assert pairing(0, 1, hs) == pytest.approx(-2j)
    assert pairing(0, 0, hs) == 0
    assert pairing(0, 1, hs) ** 2 == pytest.approx(-2 * dot(hs.spins()[0], hs.spins()[1]))


@settings(max_examples=500, deadline=None)
@given(null_spin, null_spin)
@example(null_spin_from(1e-8, 1.0), null_spin_from(1.0, -1.0))
@example(null_spin_from(1e-8, np.sqrt(2)), null_spin_from(np.sqrt(2), 1e-8))
def test_pairing_dot_identity(sa, sb):
    hs = assemble_from_spins(np.stack([sa, sb]), strict=False)
    p = pairing(0, 1, hs)
    assert p == pytest.approx(-pairing(1, 0, hs), abs=1e-12)
    assert p ** 2 == pytest.approx(-2 * dot(sa, sb), abs=1e-10)


@settings(max_examples=500, deadline=None)
@given(null_spin, null_spin)
def test_block_product_is_pairing_times_outer(sa, sb):
    hs = assemble_from_spins(np.stack([sa, sb]), strict=False)
    a, b = hs.pairs
    assert_allclose(a.to_matrix() @ b.to_matrix(), pairing(0, 1, hs) * (a.E @ H @ b.F), atol=1e-10)


@settings(max_examples=500, deadline=None)
@given(st.tuples(complex_entry, complex_entry), st.tuples(complex_entry, complex_entry))
def test_concatenation_identity(d1, d2):
    D1, D2 = np.diag(d1), np.diag(d2)
    assert_allclose(H @ D1 @ D2 @ H, np.dot(d1, d2) * H, atol=1e-12)


@settings(max_examples=500, deadline=None)
@given(matrix3, matrix3)
def test_double_is_multiplicative(A, B):
    assert_allclose(double(A @ B), double(A) @ double(B), atol=1e-12)


@settings(max_examples=500, deadline=None)
@given(matrix3, st.lists(complex_entry, min_size=4, max_size=4))
def test_double_commutes_with_block_constants(A, c):
    C = block_diag_constant(np.array(c).reshape(2, 2), 3)
    assert_allclose(double(A) @ C, C @ double(A), atol=1e-12)


def test_double_structure(rng):
    U = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    D = double(U)
    assert D.shape == (6, 6)
    assert_allclose(D[0::2, 0::2], U)
    assert_allclose(D[1::2, 1::2], U)
    assert_allclose(D[0::2, 1::2], 0)
    assert_allclose(D[1::2, 0::2], 0)
    assert_allclose(double(np.eye(4)), np.eye(8))


def test_constants():
    assert_allclose(H @ H, 2 * H)
    T = stack_T(4)
    assert_allclose(T.T @ T, 4 * np.eye(2))
    assert_allclose(block_H(2)[:2, :2], H)
    assert_allclose(block_H(2)[:2, 2:], 0)


def test_assemble_single_site():
    hs = assemble_from_spins(np.array([[1, 1j, 0]], dtype=complex))
    assert_allclose(np.diag(hs.E_rond), [1j * np.sqrt(2), 0], atol=1e-15)
    assert_allclose(np.diag(hs.F_rond), [0, -1j * np.sqrt(2)], atol=1e-15)


def test_assembled_blocks_and_sum(rng):
    alphas = rng.normal(size=4) + 1j * rng.normal(size=4)
    betas = rng.normal(size=4) + 1j * rng.normal(size=4)
    spins = np.array([null_spin_from(a, b) for a, b in zip(alphas, betas)])
    hs = assemble_from_spins(spins)
    product = hs.E_rond @ block_H(4) @ hs.F_rond
    for j in range(4):
        assert_allclose(product[2 * j:2 * j + 2, 2 * j:2 * j + 2], spin_to_matrix(spins[j]), atol=1e-12)
    T = stack_T(4)
    assert_allclose(T.T @ product @ T, spin_to_matrix(spins).sum(axis=0), atol=1e-12)
    stacked = hs.E_rond @ T
    for j in range(4):
        assert_allclose(stacked[2 * j:2 * j + 2], hs.pairs[j].E)
    assert_allclose(pairing_matrix(hs), -pairing_matrix(hs).T, atol=1e-14)


def test_assemble_empty():
    hs = assemble_from_spins(np.zeros((0, 3), dtype=complex))
    assert hs.n == 0
    assert hs.E_rond.shape == (0, 0)
    assert pairing_matrix(hs).shape == (0, 0)


@settings(max_examples=500, deadline=None)
@given(complex_entry, complex_entry, complex_entry, complex_entry)
def test_sep_predicate(alpha, beta, gamma, delta):
    assume(abs(alpha) + abs(beta) > 1e-3)
    p = HalfSpinPair(alpha, beta)
    # the map (γ, δ) -> residual is injective
    columns = np.stack([sep_residual(p, 1, 0).reshape(-1), sep_residual(p, 0, 1).reshape(-1)], axis=1)
    assert np.linalg.svd(columns, compute_uv=False)[-1] > 1e-6
    residual = sep_residual(p, gamma, delta)
    assert_allclose(residual, gamma * columns[:, 0].reshape(2, 2) + delta * columns[:, 1].reshape(2, 2), atol=1e-12)


def test_align_branches_undoes_flips(rng):
    alphas = rng.normal(size=3) + 1j * rng.normal(size=3)
    betas = rng.normal(size=3) + 1j * rng.normal(size=3)
    reference = HalfSpinSet.from_arrays(alphas, betas)
    flipped = HalfSpinSet((reference.pairs[0].negated(), reference.pairs[1], reference.pairs[2].negated()))
    aligned = align_branches(reference, flipped)
    assert_allclose(aligned.alphas, alphas)
    assert_allclose(aligned.betas, betas)

    lifted = align_sequence([reference, flipped, flipped])
    assert all(np.allclose(s.alphas, alphas) for s in lifted)


@pytest.mark.parametrize("alpha, beta", [(1e-8, 1.0), (1.0, 1e-8), (2e-9j, 0.5 - 1.5j), (0.7 + 0.1j, -3e-8)])
def test_canonical_halfspins_with_one_tiny_factor(alpha, beta):
    s = HalfSpinPair(alpha, beta).to_spin()
    p = canonical_halfspins(s)
    assert p.alpha * p.beta == pytest.approx(s[2], abs=1e-14)
    assert_allclose(p.to_matrix(), spin_to_matrix(s), atol=1e-14)
    # recovered up to the overall sign of the pair
    sign = 1 if abs(p.beta - beta) < abs(p.beta + beta) else -1
    assert p.alpha == pytest.approx(sign * alpha, abs=1e-14)
    assert p.beta == pytest.approx(sign * beta, abs=1e-14)
