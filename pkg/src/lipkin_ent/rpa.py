"""RPA (first-order Holstein-Primakoff) description of the pair concurrence.

Two levels are provided: the large-omega analytic concurrence in both phases,
and finite-omega pair-coherent states exp(gamma*S+^2) built on the (rotated)
mean field, optionally Sz-parity projected, whose measures are then computed
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .lipkin import ModelError, ModelParams, expectation
from .measures import ANTIPARALLEL, PARALLEL, ZERO, MeasureSet, state_measures
from .meanfield import BROKEN, NORMAL, mf_theta
from .numerics import collective_rotation, ladder_pair

CRITICAL_BAND = 1e-6


class CriticalRegionError(ModelError):
    """The boson expansion is singular at vx = eps."""


class NonConvergenceError(ModelError):
    pass


@dataclass(frozen=True)
class PrimedCouplings:
    eps: float
    w: float
    v: float
    lam: float


@dataclass(frozen=True)
class RPASolution:
    phase: str
    lam: float
    alpha: float
    beta: float
    gamma: float
    theta: float
    primed: PrimedCouplings | None = None


def _bogoliubov(diag: float, pair: float, lam: float) -> tuple[float, float]:
    """(alpha, beta) diagonalizing diag*b'b - pair/2*(b'^2 + b^2)."""
    alpha = math.sqrt((diag + lam) / (2 * lam))
    beta2 = max((diag - lam) / (2 * lam), 0.0)
    return alpha, math.copysign(math.sqrt(beta2), pair)


def rpa_solve(p: ModelParams) -> RPASolution:
    if abs(p.vx - p.eps) < CRITICAL_BAND * p.eps:
        raise CriticalRegionError(f"vx = {p.vx} is within the critical band around eps")
    omega = p.omega
    if p.vx < p.eps:
        # finite-omega couplings w = W*omega, v = V*omega
        w, v = p.W * omega, p.V * omega
        lam2 = (p.eps - w) ** 2 - v * v
        if lam2 <= 0 or p.eps - w <= 0:
            raise CriticalRegionError(
                f"normal-phase boson energy is imaginary at omega={omega}, vx={p.vx}"
            )
        lam = math.sqrt(lam2)
        alpha, beta = _bogoliubov(p.eps - w, v, lam)
        return RPASolution(NORMAL, lam, alpha, beta, beta / (2 * omega * alpha), 0.0)
    if p.chi >= 1.0:
        raise ModelError("broken-phase RPA is undefined at chi = 1 (Sz projection needed)")
    theta = mf_theta(p.eps, p.vx)
    cos2 = math.cos(theta) ** 2
    vx, vy = p.vx, p.vy
    eps_p = p.eps * math.cos(theta)
    w_p = (vx * (3 * cos2 - 2) + vy) / 2
    v_p = (vx * cos2 - vy) / 2
    lam_p = abs(math.sin(theta)) * math.sqrt(vx * (vx - vy))
    alpha, beta = _bogoliubov(eps_p - w_p, v_p, lam_p)
    return RPASolution(
        BROKEN,
        lam_p,
        alpha,
        beta,
        beta / (2 * omega * alpha),
        theta,
        PrimedCouplings(eps_p, w_p, v_p, lam_p),
    )


def asymptotic_lambda(p: ModelParams) -> float:
    """Large-omega normal boson energy sqrt((eps - vx)(eps - vy))."""
    return math.sqrt((p.eps - p.vx) * (p.eps - p.vy))


def rpa_concurrence_asymptotic(p: ModelParams) -> tuple[float, str]:
    if p.omega < 2:
        raise ModelError("concurrence needs omega >= 2")
    if abs(p.vx - p.eps) < CRITICAL_BAND * p.eps:
        raise CriticalRegionError(f"vx = {p.vx} is within the critical band around eps")
    scale = 1.0 / (p.omega - 1)
    vx, vy = p.vx, p.vy
    if vx < p.eps:
        value = (1 - asymptotic_lambda(p) / (p.eps - vy)) * scale
        return _tagged(value, PARALLEL)
    if p.chi >= 1.0:
        raise ModelError("broken-phase RPA is undefined at chi = 1")
    theta = mf_theta(p.eps, vx)
    lam_p = abs(math.sin(theta)) * math.sqrt(vx * (vx - vy))
    if p.chi <= 0 or vx < p.eps / math.sqrt(p.chi):
        return _tagged((1 - lam_p / (vx - vy)) * scale, PARALLEL)
    return _tagged((1 - (vx - vy) / lam_p) * scale, ANTIPARALLEL)


def _tagged(value: float, kind: str) -> tuple[float, str]:
    if value <= 0:
        return 0.0, ZERO
    return value, kind


def pair_coherent_vector(omega: int, gamma: float) -> np.ndarray:
    """Normalized exp(gamma*S+^2)|K=0> summed term by term on the K ladder."""
    up2 = ladder_pair(omega)
    total = np.zeros(omega + 1)
    term = np.zeros(omega + 1)
    term[0] = 1.0
    total[0] = 1.0
    m = 0
    while True:
        m += 1
        nxt = np.zeros(omega + 1)
        nxt[2:] = gamma * up2 * term[:-2] / m
        term = nxt
        size = np.linalg.norm(term)
        if size == 0.0:
            break
        total += term
        big = np.max(np.abs(total))
        if not math.isfinite(big):
            raise NonConvergenceError(f"pair-coherent series overflowed at gamma={gamma}")
        if big > 1e150:
            total /= big
            term /= big
        if size < 1e-16 * np.linalg.norm(total):
            break
    return total / np.linalg.norm(total)


def rpa_state(p: ModelParams, gamma: float, parity: int | None = None, theta: float | None = None) -> np.ndarray:
    """Coefficients over K of the (rotated, optionally projected) RPA state."""
    if theta is None:
        theta = mf_theta(p.eps, p.vx)
    vec = pair_coherent_vector(p.omega, gamma)
    if theta != 0.0:
        vec = collective_rotation(p.omega, theta) @ vec
    if parity is not None:
        if parity not in (1, -1):
            raise ModelError("parity must be +1, -1 or None")
        k = np.arange(p.omega + 1)
        vec = np.where((k % 2 == 0) == (parity == 1), vec, 0.0)
        size = np.linalg.norm(vec)
        if size == 0.0:
            raise ModelError(f"state has no weight in parity sector {parity}")
        vec = vec / size
    nz = np.flatnonzero(vec)
    if nz.size and vec[nz[0]] < 0:
        vec = -vec
    return vec


def rpa_energy(p: ModelParams, gamma: float, parity: int | None = None) -> float:
    return expectation(p, rpa_state(p, gamma, parity))


def _seed_gamma(p: ModelParams) -> float:
    try:
        return rpa_solve(p).gamma
    except ModelError:
        return 0.0


def variational_gamma(p: ModelParams, parity: int | None = None, tol: float = 1e-10) -> float:
    """Minimize the energy of the RPA state over gamma.

    gamma is searched in units of 1/omega on [-1.5, 1.5]; a coarse scan
    around the RPA value picks the basin and bounded Brent refines it.
    """
    if p.vx == 0.0:
        return 0.0
    omega = p.omega
    energy = lambda x: rpa_energy(p, x / omega, parity)  # noqa: E731
    grid = np.linspace(-1.5, 1.5, 61)
    energies = [energy(x) for x in grid]
    i = int(np.argmin(energies))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(energy, bounds=(lo, hi), method="bounded", options={"xatol": tol})
    candidates = [(float(res.fun), float(res.x)), (energies[i], float(grid[i]))]
    seed = _seed_gamma(p) * omega
    if lo <= seed <= hi:
        candidates.append((energy(seed), seed))
    return min(candidates)[1] / omega


@dataclass(frozen=True)
class PRPAResult:
    gamma: float
    parity: int
    energy: float
    theta: float
    coeffs: np.ndarray
    measures: MeasureSet


def prpa_solve(p: ModelParams) -> PRPAResult:
    theta = mf_theta(p.eps, p.vx)
    parities = (1,) if theta == 0.0 else (1, -1)
    best = None
    for parity in parities:
        gamma = variational_gamma(p, parity)
        coeffs = rpa_state(p, gamma, parity)
        energy = expectation(p, coeffs)
        if best is None or energy < best[2] - 1e-12 * max(1.0, abs(energy)):
            best = (gamma, parity, energy, coeffs)
    gamma, parity, energy, coeffs = best
    return PRPAResult(gamma, parity, energy, theta, coeffs, state_measures(coeffs, p.omega))


def prpa_measures(p: ModelParams) -> MeasureSet:
    return prpa_solve(p).measures
