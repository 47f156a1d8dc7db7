"""Entanglement measures of Lipkin ground states.

All entropies are in bits.  The four-mode quantities refer to the reduced
state of the modes p+, p-, q+, q- (p != q), which in any state of the form
sum_K C_K |K> only has support on the four two-fermion configurations and is
an X-shaped 4x4 matrix fixed by <Sz>, <Sz^2> and <S+^2>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lipkin import GroundState, ModelError, SpinMoments, spin_moments
from .numerics import NotPSDError, eig_sym_dense, log_binomial, sqrtm_psd

LN2 = math.log(2.0)

PARALLEL = "parallel"
ANTIPARALLEL = "antiparallel"
ZERO = "zero"


@dataclass(frozen=True)
class PairReducedState:
    a_pp: float
    a_pm: float
    a_mm: float
    b_par: float
    b_anti: float

    @property
    def trace(self) -> float:
        return self.a_pp + 2 * self.a_pm + self.a_mm

    def matrix(self) -> np.ndarray:
        """X-form matrix in the basis p+q+, p+q-, p-q+, p-q-."""
        return np.array(
            [
                [self.a_pp, 0.0, 0.0, self.b_par],
                [0.0, self.a_pm, self.b_anti, 0.0],
                [0.0, self.b_anti, self.a_pm, 0.0],
                [self.b_par, 0.0, 0.0, self.a_mm],
            ]
        )


@dataclass(frozen=True)
class MeasureSet:
    one_body_E: float
    updown_E: float
    concurrence: float
    concurrence_kind: str
    negativity: float
    mixed_one_body_E: float


def binary_entropy(f: float, tol: float = 1e-12) -> float:
    if not (-tol <= f <= 1 + tol):
        raise ValueError(f"binary entropy needs f in [0, 1], got {f!r}")
    f = min(max(f, 0.0), 1.0)
    if f == 0.0 or f == 1.0:
        return 0.0
    return -(f * math.log2(f) + (1 - f) * math.log2(1 - f))


def one_body_entropy(kmean: float, omega: int) -> float:
    """2*omega*h(<K>/omega): every site carries the same diagonal block."""
    return 2 * omega * binary_entropy(kmean / omega)


def updown_entropy(coeffs, omega: int | None = None) -> float:
    """Entropy of the upper modes versus the lower modes."""
    c = np.asarray(coeffs.coeffs if isinstance(coeffs, GroundState) else coeffs, dtype=float)
    if omega is None:
        omega = c.size - 1
    total = 0.0
    for k, ck in enumerate(c):
        w = ck * ck
        if w == 0.0:
            continue
        total += w * (log_binomial(omega, k) - math.log(w))
    return total / LN2


def reduced_pair_state(m: SpinMoments, omega: int) -> PairReducedState:
    if omega < 2:
        raise ModelError("the two-site reduced state needs omega >= 2")
    norm = omega * (omega - 1)
    if m.upper_pairs is not None:
        # populations as sums of non-negative terms: no cancellation, so tiny
        # entries stay accurate under the square root of the concurrence
        a_pp, a_pm, a_mm = m.upper_pairs / norm, m.mixed_pairs / norm, m.lower_pairs / norm
    else:
        base = m.sz2 + omega * (omega - 2) / 4
        a_pp = (base + (omega - 1) * m.sz) / norm
        a_pm = (omega * omega / 4 - m.sz2) / norm
        a_mm = (base - (omega - 1) * m.sz) / norm
    return PairReducedState(a_pp=a_pp, a_pm=a_pm, a_mm=a_mm, b_par=m.splus2 / norm, b_anti=a_pm)


def concurrence_closed(r: PairReducedState) -> tuple[float, str]:
    par = abs(r.b_par) - r.a_pm
    anti = abs(r.b_anti) - math.sqrt(max(r.a_pp * r.a_mm, 0.0))
    best = max(par, anti)
    if best <= 0:
        return 0.0, ZERO
    return 2 * best, (PARALLEL if par >= anti else ANTIPARALLEL)


# Position of each pair configuration inside the 8-dim even Fock basis
#   {|0>, 12, 13, 14, -1234, 34, -24, 23}   with modes 1=p+, 2=p-, 3=q+, 4=q-,
# together with the sign relating the configuration to that basis vector.
_FOCK_SLOTS = ((2, 1.0), (3, 1.0), (7, 1.0), (6, -1.0))  # p+q+, p+q-, p-q+, p-q-
_T_SWAP = np.block([[np.zeros((4, 4)), np.eye(4)], [np.eye(4), np.zeros((4, 4))]])


def fock_embedding(r: PairReducedState) -> np.ndarray:
    x = r.matrix()
    rho = np.zeros((8, 8))
    for i, (si, gi) in enumerate(_FOCK_SLOTS):
        for j, (sj, gj) in enumerate(_FOCK_SLOTS):
            rho[si, sj] = gi * gj * x[i, j]
    return rho


def concurrence_oracle(r: PairReducedState) -> float:
    """Four-mode fermionic concurrence max(2*lmax - Tr R, 0) evaluated directly.

    R = sqrt(sqrt(rho) rho~ sqrt(rho)) with rho~ = T rho* T in the even Fock
    space of four modes.  Since rho is real and T is a symmetric involution,
    R is the modulus of the symmetric matrix sqrt(rho) T sqrt(rho), so its
    eigenvalues are taken as |eig| of that product; this avoids a second
    square root that would turn 1e-17 roundoff into 1e-9 errors.
    """
    rho = fock_embedding(r)
    lam = eig_sym_dense(rho).values
    if lam[0] < -1e-8:
        raise NotPSDError(f"embedded state has eigenvalue {lam[0]:.3e}")
    root = sqrtm_psd(rho)
    product = root @ _T_SWAP @ root
    vals = np.sort(np.abs(eig_sym_dense(0.5 * (product + product.T)).values))
    return max(2 * vals[-1] - float(np.sum(vals)), 0.0)


def concurrence_oracle_rmatrix(r: PairReducedState) -> np.ndarray:
    """The matrix R(rho) itself, built literally with two square roots."""
    rho = fock_embedding(r)
    root = sqrtm_psd(rho)
    inner = root @ (_T_SWAP @ rho @ _T_SWAP) @ root
    return sqrtm_psd(0.5 * (inner + inner.T))


def mixed_one_body_entanglement(c: float) -> float:
    if not (-1e-12 <= c <= 1 + 1e-12):
        raise ValueError(f"concurrence must lie in [0, 1], got {c!r}")
    c = min(max(c, 0.0), 1.0)
    return 4 * binary_entropy((1 + math.sqrt(1 - c * c)) / 2)


def negativity_updown(r: PairReducedState) -> float:
    return abs(r.b_par) + abs(r.b_anti)


def pair_measures(r: PairReducedState) -> tuple[float, str, float, float]:
    c, kind = concurrence_closed(r)
    return c, kind, negativity_updown(r), mixed_one_body_entanglement(c)


def state_measures(coeffs, omega: int | None = None) -> MeasureSet:
    """Every measure for a coefficient vector over K = 0..omega."""
    c = np.asarray(coeffs.coeffs if isinstance(coeffs, GroundState) else coeffs, dtype=float)
    if omega is None:
        omega = c.size - 1
    m = spin_moments(c, omega)
    e1 = one_body_entropy(m.kmean, omega)
    eud = updown_entropy(c, omega)
    if omega < 2:
        return MeasureSet(e1, eud, 0.0, ZERO, 0.0, 0.0)
    conc, kind, neg, mixed = pair_measures(reduced_pair_state(m, omega))
    return MeasureSet(e1, eud, conc, kind, neg, mixed)


def k_state_measures(omega: int, k: int) -> MeasureSet:
    """Closed-form measures of the Sz eigenstate |K> of the S = omega/2 multiplet."""
    if omega < 2:
        raise ModelError("k_state_measures needs omega >= 2")
    if not 0 <= k <= omega:
        raise ModelError(f"K must lie in 0..{omega}, got {k}")
    frac = k / omega
    e1 = 2 * omega * binary_entropy(frac)
    eud = log_binomial(omega, k) / LN2
    if k in (0, omega):
        conc, kind = 0.0, ZERO
    else:
        radicand = 1 - (omega - 1) / (k * (omega - k))
        conc = (2 / omega) / (1 + math.sqrt(max(radicand, 0.0)))
        kind = ANTIPARALLEL
    neg = omega / (omega - 1) * frac * (1 - frac)
    return MeasureSet(e1, eud, conc, kind, neg, mixed_one_body_entanglement(conc))
