"""
Half-spin factorization A_j = E_j H F_j and the doubled-matrix calculus
src/modules/algebra/halfspin.py

For a null spin s the canonical half-spins (α, β) satisfy
    -α² = s1 - i s2,   β² = s1 + i s2,   αβ = s3
and give e = (α, β), ξ = (β, -α), E = diag(α, β), F = diag(β, -α).
Doubled matrices are kept as their N×N base; `double` materializes [U] = U ⊗ I₂
for the literal 2N×2N formulas.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging

import numpy as np
from numpy.typing import ArrayLike

from ..config.hwm_config import ToleranceConfig, DEFAULT_TOLERANCES
from ..utils.errors import NotNull
from .spin_algebra import as_spin, dot, Mat2

logger = logging.getLogger(__name__)

H = np.ones((2, 2), dtype=complex)
H.setflags(write=False)


@dataclass(frozen=True)
class HalfSpinPair:
    """Half-spins (α_j, β_j) of one site."""
    alpha: complex
    beta: complex

    @property
    def e(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    @property
    def xi(self) -> np.ndarray:
        return np.array([self.beta, -self.alpha], dtype=complex)

    @property
    def E(self) -> Mat2:
        return np.diag(self.e)

    @property
    def F(self) -> Mat2:
        return np.diag(self.xi)

    def negated(self) -> "HalfSpinPair":
        return HalfSpinPair(-self.alpha, -self.beta)

    def to_matrix(self) -> Mat2:
        return halfspin_to_matrix(self)

    def to_spin(self) -> np.ndarray:
        """Spin reconstructed from the pair (always null)."""
        a, b = self.alpha, self.beta
        # -α² = s1 - i s2, β² = s1 + i s2
        return np.array([(b * b - a * a) / 2, (b * b + a * a) / 2j, a * b], dtype=complex)


@dataclass(frozen=True)
class HalfSpinSet:
    """Half-spins of all N sites and the assembled block matrices."""
    pairs: Tuple[HalfSpinPair, ...]

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for p in self.pairs], dtype=complex)

    @property
    def betas(self) -> np.ndarray:
        return np.array([p.beta for p in self.pairs], dtype=complex)

    @property
    def e_rows(self) -> np.ndarray:
        """N×2 matrix whose rows are e_j; equals the stacking 𝓔T."""
        return np.stack([self.alphas, self.betas], axis=-1) if self.n else np.zeros((0, 2), dtype=complex)

    @property
    def xi_rows(self) -> np.ndarray:
        """N×2 matrix whose rows are ξ_j; equals the stacking 𝓕T."""
        return np.stack([self.betas, -self.alphas], axis=-1) if self.n else np.zeros((0, 2), dtype=complex)

    @property
    def E_rond(self) -> np.ndarray:
        """2N×2N diagonal 𝓔 = diag(α₁, β₁, α₂, β₂, ...)."""
        return np.diag(self.e_rows.reshape(-1))

    @property
    def F_rond(self) -> np.ndarray:
        """2N×2N diagonal 𝓕 = diag(β₁, -α₁, β₂, -α₂, ...)."""
        return np.diag(self.xi_rows.reshape(-1))

    def spins(self) -> np.ndarray:
        return np.array([p.to_spin() for p in self.pairs], dtype=complex).reshape(-1, 3)

    def blocks(self) -> np.ndarray:
        """Stack of A_j = E_j H F_j, shape (N, 2, 2)."""
        return np.array([halfspin_to_matrix(p) for p in self.pairs], dtype=complex).reshape(-1, 2, 2)

    @classmethod
    def from_arrays(cls, alphas: ArrayLike, betas: ArrayLike) -> "HalfSpinSet":
        return cls(tuple(HalfSpinPair(complex(a), complex(b)) for a, b in zip(alphas, betas)))


def stack_T(n: int) -> np.ndarray:
    """T: the 2N×2 vertical stack of I₂."""
    return np.tile(np.eye(2, dtype=complex), (n, 1))


def block_H(n: int) -> np.ndarray:
    """𝓗: 2N×2N block-diagonal with H on every block."""
    return np.kron(np.eye(n, dtype=complex), H)


def block_diag_constant(C: ArrayLike, n: int) -> np.ndarray:
    """2N×2N block-diagonal with a fixed 2x2 block C."""
    return np.kron(np.eye(n, dtype=complex), np.asarray(C, dtype=complex))


def double(U: ArrayLike) -> np.ndarray:
    """Doubled matrix [U] whose (i, j) block is U_ij I₂."""
    U = np.asarray(U, dtype=complex)
    return np.kron(U, np.eye(2, dtype=complex))


def canonical_halfspins(s: ArrayLike, tol: Optional[ToleranceConfig] = None, strict: bool = True) -> HalfSpinPair:
    """
    Canonical half-spins of a null spin.

    α is the principal root of -s1 + i s2 and β a root of s1 + i s2 with
    αβ = s3. The larger of the two is taken from its square root and the
    other from s3, so both stay accurate when one of them is tiny. When α
    comes from s3 the pair is negated if needed to keep α on the principal
    branch. Below branch_tol, α = 0 and β is the principal root of s1 + i s2.

    Raises:
        NotNull: if |s·s| > null_tol and strict is set
    """
    tol = tol or DEFAULT_TOLERANCES
    s = as_spin(s)
    residual = abs(dot(s, s))
    if strict and residual > tol.null_tol:
        raise NotNull(f"|s·s| = {residual:.3e} exceeds null tolerance {tol.null_tol:.1e}")

    s1, s2, s3 = s
    alpha = complex(np.sqrt(-s1 + 1j * s2))
    beta = complex(np.sqrt(s1 + 1j * s2))
    if abs(alpha) <= tol.branch_tol:
        return HalfSpinPair(0j, beta)
    if abs(alpha) >= abs(beta):
        return HalfSpinPair(alpha, complex(s3 / alpha))

    derived = complex(s3 / beta)
    if (np.conj(alpha) * derived).real < 0:
        return HalfSpinPair(-derived, -beta)
    return HalfSpinPair(derived, beta)


def halfspin_to_matrix(p: HalfSpinPair) -> Mat2:
    """E H F = [[αβ, -α²], [β², -αβ]]."""
    a, b = p.alpha, p.beta
    return np.array([[a * b, -a * a], [b * b, -a * b]], dtype=complex)


def pairing(j: int, k: int, hs: HalfSpinSet) -> complex:
    """ξ_j·e_k = β_j α_k - α_j β_k (antisymmetric in j, k)."""
    pj, pk = hs.pairs[j], hs.pairs[k]
    return complex(pj.beta * pk.alpha - pj.alpha * pk.beta)


def pairing_matrix(hs: HalfSpinSet) -> np.ndarray:
    """N×N matrix of pairings P_jk = ξ_j·e_k (zero diagonal)."""
    return hs.xi_rows @ hs.e_rows.T


def assemble_from_spins(spins: ArrayLike, tol: Optional[ToleranceConfig] = None,
                        strict: bool = True) -> HalfSpinSet:
    spins = as_spin(spins).reshape(-1, 3)
    return HalfSpinSet(tuple(canonical_halfspins(s, tol, strict=strict) for s in spins))


def assemble(data, tol: Optional[ToleranceConfig] = None, strict: bool = True) -> HalfSpinSet:
    """
    Canonical half-spins of every site of a RationalData.

    Raises:
        NotNull: propagated from canonical_halfspins
    """
    return assemble_from_spins(data.spins, tol, strict=strict)


def align_branches(previous: HalfSpinSet, current: HalfSpinSet) -> HalfSpinSet:
    """
    Per-site sign choice of `current` closest to `previous`.

    Canonical branch cuts can flip (α, β) -> (-α, -β) between nearby states;
    this picks the continuous lift.
    """
    if previous.n != current.n:
        raise ValueError(f"Cannot align {current.n} pairs against {previous.n}")
    aligned: List[HalfSpinPair] = []
    for prev, cur in zip(previous.pairs, current.pairs):
        keep = abs(cur.alpha - prev.alpha) + abs(cur.beta - prev.beta)
        flip = abs(cur.alpha + prev.alpha) + abs(cur.beta + prev.beta)
        aligned.append(cur if keep <= flip else cur.negated())
    return HalfSpinSet(tuple(aligned))


def align_sequence(sets: Sequence[HalfSpinSet]) -> List[HalfSpinSet]:
    """Branch-continuous lift of a time series of half-spin sets."""
    if not sets:
        return []
    lifted = [sets[0]]
    for hs in sets[1:]:
        lifted.append(align_branches(lifted[-1], hs))
    return lifted


def sep_residual(p: HalfSpinPair, gamma: complex, delta: complex) -> Mat2:
    """𝓚₁ H F + E H 𝓚₂ with 𝓚₁ = diag(γ, δ), 𝓚₂ = diag(δ, -γ)."""
    K1 = np.diag([gamma, delta]).astype(complex)
    K2 = np.diag([delta, -gamma]).astype(complex)
    return K1 @ H @ p.F + p.E @ H @ K2
