"""Exact solution of the half-filled fermionic Lipkin model.

With N = omega fermions on omega doubly degenerate sites the attractive
ground state lives in the maximal-spin multiplet S = omega/2, spanned by the
states |K> with K fermions in the upper level.  The Hamiltonian

    H = eps*Sz - Vx*(Sx^2 + chi*Sy^2) + Vx*(1+chi)*N/4,   Vx = vx/(omega-1)

only couples K to K+-2, so each Sz-parity sector is a tridiagonal matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .numerics import SymTriMatrix, eig_sym_tridiagonal, ladder_pair

DEGENERACY_TOL = 1e-9


class ModelError(ValueError):
    """Invalid model parameters or a request outside the model's domain."""


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs (omega, eps, vx, chi); vx is the size-scaled coupling."""

    omega: int
    eps: float = 1.0
    vx: float = 0.0
    chi: float = 0.0

    def __post_init__(self):
        if int(self.omega) != self.omega or self.omega < 1:
            raise ModelError(f"omega must be a positive integer, got {self.omega!r}")
        object.__setattr__(self, "omega", int(self.omega))
        for name in ("eps", "vx", "chi"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ModelError(f"{name} must be finite")
            object.__setattr__(self, name, val)
        if self.eps <= 0:
            raise ModelError("eps must be > 0")
        if self.vx < 0:
            raise ModelError("vx must be >= 0 (attractive coupling only)")
        if not -1.0 <= self.chi <= 1.0:
            raise ModelError("chi must lie in [-1, 1]")
        if self.omega == 1 and self.vx != 0:
            raise ModelError("omega = 1 is non-interacting; vx must be 0")

    @property
    def Vx(self) -> float:
        return 0.0 if self.omega == 1 else self.vx / (self.omega - 1)

    @property
    def W(self) -> float:
        return self.Vx * (1 + self.chi) / 2

    @property
    def V(self) -> float:
        return self.Vx * (1 - self.chi) / 2

    @property
    def vy(self) -> float:
        return self.chi * self.vx

    @property
    def constant(self) -> float:
        """The c-number Vx*(1+chi)*N/4 carried by the Hamiltonian."""
        return self.Vx * (1 + self.chi) * self.omega / 4


@dataclass(frozen=True)
class GroundState:
    coeffs: np.ndarray
    parity: int
    energy: float
    degenerate: bool = False

    @property
    def omega(self) -> int:
        return self.coeffs.size - 1


@dataclass(frozen=True)
class SpinMoments:
    sz: float
    sz2: float
    splus2: float
    kmean: float
    # <K(K-1)>, <K(omega-K)>, <(omega-K)(omega-K-1)> summed term by term; None
    # when only the first moments are known
    upper_pairs: float | None = None
    mixed_pairs: float | None = None
    lower_pairs: float | None = None


def block_levels(omega: int, parity: int) -> np.ndarray:
    if parity not in (1, -1):
        raise ModelError(f"parity must be +1 or -1, got {parity!r}")
    start = 0 if parity == 1 else 1
    return np.arange(start, omega + 1, 2)


def _diagonal(p: ModelParams) -> np.ndarray:
    s = p.omega / 2
    m = np.arange(p.omega + 1) - s
    return p.eps * m - p.W * (s * (s + 1) - m**2) + p.constant


def _pair_coupling(p: ModelParams) -> np.ndarray:
    """<K+2|H|K> for K = 0..omega-2."""
    return -p.Vx * (1 - p.chi) / 4 * ladder_pair(p.omega)


def build_hamiltonian(p: ModelParams, parity: int) -> SymTriMatrix:
    """Tridiagonal block of H over the K values with (-1)^K = parity."""
    ks = block_levels(p.omega, parity)
    if ks.size == 0:
        raise ModelError(f"omega={p.omega} has no levels with parity {parity}")
    diag = _diagonal(p)[ks]
    off = _pair_coupling(p)[ks[:-1]] if ks.size > 1 else np.zeros(0)
    return SymTriMatrix(diag, off)


def full_hamiltonian(p: ModelParams) -> np.ndarray:
    """Dense (omega+1)x(omega+1) Hamiltonian in the |K> basis."""
    h = np.diag(_diagonal(p))
    if p.omega >= 2:
        idx = np.arange(p.omega - 1)
        off = _pair_coupling(p)
        h[idx + 2, idx] = off
        h[idx, idx + 2] = off
    return h


def expectation(p: ModelParams, coeffs: np.ndarray) -> float:
    """<c|H|c> for a normalized real coefficient vector over K = 0..omega."""
    c = np.asarray(coeffs, dtype=float)
    e = float(np.dot(_diagonal(p), c * c))
    if p.omega >= 2:
        e += 2.0 * float(np.dot(_pair_coupling(p), c[2:] * c[:-2]))
    return e


def fix_sign(coeffs: np.ndarray) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    nz = np.flatnonzero(np.abs(c) > 0)
    if nz.size and c[nz[0]] < 0:
        c = -c
    return c


def ground_state(p: ModelParams) -> GroundState:
    candidates = []
    for parity in (1, -1):
        ks = block_levels(p.omega, parity)
        if ks.size == 0:
            continue
        dec = eig_sym_tridiagonal(build_hamiltonian(p, parity))
        coeffs = np.zeros(p.omega + 1)
        coeffs[ks] = dec.vectors[:, 0]
        coeffs /= np.linalg.norm(coeffs)
        candidates.append((float(dec.values[0]), parity, coeffs))
    even = candidates[0]
    best = min(candidates, key=lambda t: t[0])
    degenerate = len(candidates) == 2 and abs(candidates[0][0] - candidates[1][0]) < DEGENERACY_TOL * p.eps
    if degenerate:
        best = even
    energy, parity, coeffs = best
    return GroundState(fix_sign(coeffs), parity, energy, degenerate)


class IsotropicLevel(NamedTuple):
    k: int
    degenerate: bool


def isotropic_gs_level(p: ModelParams, rtol: float = 1e-12) -> IsotropicLevel:
    """Ground-state level K of the chi = 1 model from the closed-form transitions.

    The level K-1 -> K crossing sits at Vx = eps/(omega + 1 - 2K).
    """
    if p.chi != 1.0:
        raise ModelError("isotropic_gs_level requires chi = 1")
    k = 0
    for cand in range(1, p.omega // 2 + 1):
        threshold = p.eps / (p.omega + 1 - 2 * cand)
        if abs(p.Vx - threshold) <= rtol * threshold:
            return IsotropicLevel(k, True)
        if p.Vx > threshold:
            k = cand
        else:
            break
    return IsotropicLevel(k, False)


def isotropic_energy(p: ModelParams, k: int, spin: float | None = None) -> float:
    """Closed-form chi = 1 eigenenergy E_{S,K} (constant term included)."""
    s = p.omega / 2 if spin is None else spin
    m = k - p.omega / 2
    return p.eps * m - p.Vx * (s * (s + 1) - m * m - p.omega / 2)


def spin_moments(coeffs: np.ndarray, omega: int | None = None) -> SpinMoments:
    c = np.asarray(coeffs.coeffs if isinstance(coeffs, GroundState) else coeffs, dtype=float)
    if omega is None:
        omega = c.size - 1
    if c.size != omega + 1:
        raise ModelError(f"expected {omega + 1} coefficients, got {c.size}")
    w = c * c
    m = np.arange(omega + 1) - omega / 2
    sz = float(np.dot(w, m))
    sz2 = float(np.dot(w, m * m))
    splus2 = float(np.dot(ladder_pair(omega), c[2:] * c[:-2])) if omega >= 2 else 0.0
    k = np.arange(omega + 1, dtype=float)
    up, low = k * (k - 1), (omega - k) * (omega - k - 1)
    return SpinMoments(
        sz,
        sz2,
        splus2,
        float(np.dot(w, k)),
        float(np.dot(w, up)),
        float(np.dot(w, k * (omega - k))),
        float(np.dot(w, low)),
    )


def eigenstate_residual(p: ModelParams, coeffs: np.ndarray) -> float:
    """||H c - <H> c||_2 for a normalized coefficient vector."""
    c = np.asarray(coeffs, dtype=float)
    hc = full_hamiltonian(p) @ c
    return float(np.linalg.norm(hc - np.dot(c, hc) * c))


def hamiltonian_norm(p: ModelParams) -> float:
    return float(np.linalg.norm(full_hamiltonian(p), 2))
