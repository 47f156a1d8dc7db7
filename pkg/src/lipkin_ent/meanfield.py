"""Mean-field solution and its Sz-parity restored versions.

The mean-field state is the Slater determinant obtained by rotating the
unperturbed ground state about the y axis by theta.  Parity restoration
combines the +theta and -theta determinants; its norm involves
cos(theta)**omega, which is always handled through logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .lipkin import ModelError, ModelParams, expectation
from .measures import (
    ANTIPARALLEL,
    LN2,
    PARALLEL,
    ZERO,
    MeasureSet,
    PairReducedState,
    binary_entropy,
    concurrence_closed,
    k_state_measures,
    mixed_one_body_entanglement,
    negativity_updown,
)
from .numerics import log_binomial_row

NORMAL = "normal"
BROKEN = "broken"


@dataclass(frozen=True)
class MFSolution:
    theta: float
    energy: float
    phase: str

    @property
    def order_param(self) -> float:
        return math.sin(self.theta)


@dataclass(frozen=True)
class ProjectedMFState:
    theta: float
    parity: int
    coeffs: np.ndarray


def mf_theta(eps: float, vx: float) -> float:
    return 0.0 if vx <= eps else math.acos(eps / vx)


def mf_solve(p: ModelParams) -> MFSolution:
    """Minimize the determinant energy over the rotation angle.

    The Wick energy omega*(eps<s_z> - vx<s_x>^2) already equals the full
    expectation value of H including its constant term, so nothing is added.
    """
    theta = mf_theta(p.eps, p.vx)
    cos, sin = math.cos(theta), math.sin(theta)
    energy = p.omega * (-p.eps * cos / 2 - p.vx * sin * sin / 4)
    return MFSolution(theta, energy, NORMAL if theta == 0.0 else BROKEN)


def _log_mf_coefficients(theta: float, omega: int) -> np.ndarray:
    half = theta / 2
    c, s = math.cos(half), math.sin(half)
    k = np.arange(omega + 1)
    logs = 0.5 * log_binomial_row(omega)
    if c > 0:
        logs += (omega - k) * math.log(c)
    else:
        logs[k < omega] = -math.inf
    if s > 0:
        logs += k * math.log(s)
    else:
        logs[k > 0] = -math.inf
    return logs


def _from_logs(logs: np.ndarray) -> np.ndarray:
    top = np.max(logs)
    if not math.isfinite(top):
        raise ModelError("state has no support")
    out = np.exp(logs - top)
    return out / np.linalg.norm(out)


def mf_coefficients(theta: float, omega: int) -> np.ndarray:
    """Amplitudes sqrt(C(omega,K)) cos^(omega-K)(theta/2) sin^K(theta/2), normalized."""
    if not 0.0 <= theta <= math.pi:
        raise ModelError("theta must lie in [0, pi]")
    return _from_logs(_log_mf_coefficients(theta, omega))


def mf_measures(sol: MFSolution, chi: float, omega: int) -> MeasureSet:
    """Measures from the diagonal (basic parity projected) mean-field density."""
    cos, sin = math.cos(sol.theta), math.sin(sol.theta)
    f_up = (1 - cos) / 2
    e1 = 2 * omega * binary_entropy(f_up)
    neg = (0.25 if chi >= 1.0 else 0.5) * sin * sin
    return MeasureSet(e1, e1 / 2, 0.0, ZERO, neg, 0.0)


def pmf_state(theta: float, omega: int, parity: int) -> ProjectedMFState:
    if parity not in (1, -1):
        raise ModelError("parity must be +1 or -1")
    if theta == 0.0:
        coeffs = np.zeros(omega + 1)
        coeffs[0 if parity == 1 else 1] = 1.0
        return ProjectedMFState(theta, parity, coeffs)
    logs = _log_mf_coefficients(theta, omega)
    k = np.arange(omega + 1)
    logs[(k % 2 == 0) != (parity == 1)] = -math.inf
    return ProjectedMFState(theta, parity, _from_logs(logs))


@dataclass(frozen=True)
class _Overlaps:
    cos: float
    norm: float  # 1 +- cos^omega
    odd_ratio: float  # (1 -+ cos^(omega-1)) / norm  applied to f_+
    even_ratio: float  # (1 +- cos^(omega-1)) / norm  applied to f_-
    pair_same: float  # (1 +- cos^(omega-2)) / norm
    pair_cross: float  # (1 -+ cos^(omega-2)) / norm


def _one_plus(sign: float, x: float, logx: float) -> float:
    """1 + sign*x with x = exp(logx) > 0, exact near x -> 1."""
    if sign > 0:
        return 1.0 + x
    return -math.expm1(logx) if logx > -745 else 1.0


def _log_abs_cos(theta: float) -> float:
    half = math.sin(theta / 2)
    if half * half < 0.25:
        return math.log1p(-2 * half * half)
    return math.log(abs(math.cos(theta))) if math.cos(theta) != 0 else -math.inf


def _cos_power(theta: float, power: int) -> tuple[float, float]:
    """(sign, log|cos theta|*power) for cos(theta)**power."""
    cos = math.cos(theta)
    if power == 0:
        return 1.0, 0.0
    if cos == 0.0:
        return 0.0, -math.inf
    sign = 1.0 if (cos > 0 or power % 2 == 0) else -1.0
    return sign, power * _log_abs_cos(theta)


def _overlaps(theta: float, omega: int, parity: int) -> _Overlaps:
    def one_pm(power: int, sgn: float) -> float:
        sign, lg = _cos_power(theta, power)
        if sign == 0.0:
            return 1.0
        val = math.exp(lg) if lg > -745 else 0.0
        return _one_plus(sgn * sign, val, lg)

    norm = one_pm(omega, parity)
    return _Overlaps(
        cos=math.cos(theta),
        norm=norm,
        odd_ratio=one_pm(omega - 1, -parity) / norm,
        even_ratio=one_pm(omega - 1, parity) / norm,
        pair_same=one_pm(omega - 2, parity) / norm,
        pair_cross=one_pm(omega - 2, -parity) / norm,
    )


def pmf_occupations(theta: float, omega: int, parity: int) -> tuple[float, float]:
    """(f_+, f_-) of the parity-restored determinant pair."""
    o = _overlaps(theta, omega, parity)
    up, dn = math.sin(theta / 2) ** 2, math.cos(theta / 2) ** 2
    return up * o.odd_ratio, dn * o.even_ratio


def pmf_pair_state(theta: float, omega: int, parity: int) -> PairReducedState:
    o = _overlaps(theta, omega, parity)
    sin2 = math.sin(theta) ** 2
    shift = o.cos / 2 * o.pair_same
    b_par = sin2 / 4 * o.pair_same
    b_anti = sin2 / 4 * o.pair_cross
    return PairReducedState(
        a_pp=0.5 - b_anti - shift,
        a_pm=b_anti,
        a_mm=0.5 - b_anti + shift,
        b_par=b_par,
        b_anti=b_anti,
    )


def pmf_concurrence(theta: float, omega: int, parity: int) -> float:
    """sin^2(theta) cos^(omega-2)(theta) / (1 +- cos^omega(theta))."""
    o = _overlaps(theta, omega, parity)
    sign, lg = _cos_power(theta, omega - 2)
    if sign == 0.0:
        return 0.0
    val = math.sin(theta) ** 2 * sign * (math.exp(lg) if lg > -745 else 0.0) / o.norm
    return min(max(val, 0.0), 1.0)


def pmf_measures(theta: float, omega: int, parity: int) -> MeasureSet:
    if omega < 2:
        raise ModelError("pmf_measures needs omega >= 2")
    if not 0.0 <= theta < math.pi:
        raise ModelError("theta must lie in [0, pi)")
    if theta == 0.0:
        return k_state_measures(omega, 0 if parity == 1 else 1)
    o = _overlaps(theta, omega, parity)
    f_up, f_dn = pmf_occupations(theta, omega, parity)
    e1 = 2 * omega * binary_entropy(f_up)
    # up-down entropy of the projected amplitudes: the upper occupation pairs
    # with log sin^2(theta/2) = log((1 - cos)/2), the lower one with log cos^2(theta/2)
    lg_up = 2 * math.log(math.sin(theta / 2))
    lg_dn = 2 * math.log(math.cos(theta / 2))
    eud = (-omega * (f_up * lg_up + f_dn * lg_dn) - math.log(2 / o.norm)) / LN2
    pair = pmf_pair_state(theta, omega, parity)
    if theta <= math.pi / 2:
        conc = pmf_concurrence(theta, omega, parity)
        kind = ZERO if conc == 0.0 else (PARALLEL if parity == 1 else ANTIPARALLEL)
    else:
        conc, kind = concurrence_closed(pair)
    return MeasureSet(e1, eud, conc, kind, negativity_updown(pair), mixed_one_body_entanglement(conc))


def pmf_energy(p: ModelParams, theta: float, parity: int) -> float:
    return expectation(p, pmf_state(theta, p.omega, parity).coeffs)


def pmf_variational_theta(
    p: ModelParams, parity: int, tol: float = 1e-10, grid: int = 48
) -> tuple[float, float]:
    """Minimize the parity-projected energy over theta in [0, pi/2].

    A coarse scan brackets the global minimum, then a bounded Brent search
    refines it.
    """
    upper = math.pi / 2
    thetas = np.linspace(0.0, upper, grid + 1)
    energies = [pmf_energy(p, t, parity) for t in thetas]
    i = int(np.argmin(energies))
    lo, hi = thetas[max(i - 1, 0)], thetas[min(i + 1, grid)]
    res = minimize_scalar(
        lambda t: pmf_energy(p, t, parity),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": tol},
    )
    best_theta, best_energy = float(res.x), float(res.fun)
    for t, e in ((thetas[i], energies[i]), (lo, pmf_energy(p, lo, parity))):
        if e < best_energy:
            best_theta, best_energy = float(t), float(e)
    return best_theta, best_energy


def pmfv_solve(p: ModelParams) -> tuple[float, int, float]:
    """Projected-before-variation solution: (theta, parity, energy) of lowest energy."""
    best = None
    for parity in (1, -1):
        theta, energy = pmf_variational_theta(p, parity)
        if best is None or energy < best[2] - 1e-12 * max(1.0, abs(energy)):
            best = (theta, parity, energy)
    return best


def pmf_parity_at(p: ModelParams, theta: float) -> tuple[int, float]:
    """Parity whose projection of the theta determinant has the lower energy."""
    e_even = pmf_energy(p, theta, 1)
    e_odd = pmf_energy(p, theta, -1)
    return (1, e_even) if e_even <= e_odd + 1e-12 * max(1.0, abs(e_even)) else (-1, e_odd)

