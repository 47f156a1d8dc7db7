"""Built-in verification suite.

Each check returns a CheckResult with the worst measured deviation, the
tolerance it was held to and its runtime.  `quick` runs the small-omega
checks only; `full` runs everything including the omega = 50 sweeps.
"""

from __future__ import annotations

import hashlib
import math
import os
import tempfile
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import lipkin
from .lipkin import ModelParams, ground_state, hamiltonian_norm, isotropic_energy, spin_moments
from .meanfield import mf_coefficients, mf_solve, pmf_measures, pmf_parity_at, pmfv_solve
from .measures import (
    ANTIPARALLEL,
    PARALLEL,
    binary_entropy,
    concurrence_closed,
    concurrence_oracle,
    k_state_measures,
    reduced_pair_state,
    state_measures,
)
from .numerics import eig_sym_tridiagonal
from .rpa import prpa_solve, rpa_concurrence_asymptotic
from .sweep import figure_preset, write_outputs

SEPARABILITY_WINDOW = 0.05


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    measured: float
    tolerance: float
    runtime: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"{status} criterion={self.number} name={self.name} "
            f"measured={self.measured:.6g} tolerance={self.tolerance:.6g} runtime={self.runtime:.3f}s"
        )
        return text + (f" detail={self.detail}" if self.detail else "")


def _timed(number: int, name: str, fn: Callable[[], tuple[bool, float, float, str]]) -> CheckResult:
    start = time.perf_counter()
    passed, measured, tol, detail = fn()
    return CheckResult(number, name, bool(passed), float(measured), float(tol), time.perf_counter() - start, detail)


def _spectrum(p: ModelParams) -> np.ndarray:
    values = []
    for parity in (1, -1):
        if lipkin.block_levels(p.omega, parity).size:
            values.extend(eig_sym_tridiagonal(lipkin.build_hamiltonian(p, parity)).values)
    return np.sort(values)


def _dominant_level(p: ModelParams) -> int:
    return int(np.argmax(np.abs(ground_state(p).coeffs)))


def isotropic_spectrum() -> tuple[bool, float, float, str]:
    tol = 1e-10
    worst = 0.0
    for omega in list(range(2, 13)) + [50]:
        for vx in (0.0, 0.5, 1.5, 3.0):
            p = ModelParams(omega, 1.0, vx, 1.0)
            exact = _spectrum(p)
            closed = np.sort([isotropic_energy(p, k) for k in range(omega + 1)])
            scale = np.maximum(np.abs(closed), p.eps)
            worst = max(worst, float(np.max(np.abs(exact - closed) / scale)))
    omega = 50
    bad = []
    for k in range(omega // 2):
        vx_k = (omega - 1) / (omega - 1 - 2 * k)
        below = _dominant_level(ModelParams(omega, 1.0, vx_k * (1 - 1e-7), 1.0))
        above = _dominant_level(ModelParams(omega, 1.0, vx_k * (1 + 1e-7), 1.0))
        p = ModelParams(omega, 1.0, vx_k, 1.0)
        gap = abs(isotropic_energy(p, k) - isotropic_energy(p, k + 1)) / max(abs(isotropic_energy(p, k)), 1.0)
        worst = max(worst, gap)
        if (below, above) != (k, k + 1):
            bad.append(k)
    ok = worst <= tol and not bad
    return ok, worst, tol, f"transitions_off_at_K={bad}" if bad else "transitions_ok"


def oracle_equivalence(omegas=tuple(range(3, 13)) + (50,)) -> tuple[bool, float, float, str]:
    tol = 1e-9
    worst, count = 0.0, 0
    for omega in omegas:
        for chi in (-1.0, -0.5, 0.0, 0.5, 1.0):
            for vx in np.linspace(0.0, 5.0, 11):
                gs = ground_state(ModelParams(omega, 1.0, float(vx), chi))
                pair = reduced_pair_state(spin_moments(gs), omega)
                worst = max(worst, abs(concurrence_closed(pair)[0] - concurrence_oracle(pair)))
                count += 1
    return worst <= tol and count >= 500, worst, tol, f"states={count}"


def point_values() -> tuple[bool, float, float, str]:
    omega = 50
    errors = []

    def basis(k):
        c = np.zeros(omega + 1)
        c[k] = 1.0
        return state_measures(c, omega)

    k1, k25 = k_state_measures(omega, 1), k_state_measures(omega, 25)
    g1, g25 = basis(1), basis(25)
    errors.append(abs(k1.concurrence - 2 / omega) / 1e-12)
    errors.append(abs(k25.concurrence - 1 / (omega - 1)) / 1e-12)
    errors.append(abs(k25.negativity - omega / (omega - 1) / 4) / 1e-12)
    errors.append(abs(k25.one_body_E / (2 * omega) - 1) / 1e-12)
    errors.append(abs(g1.concurrence - 2 / omega) / 1e-9)
    errors.append(abs(g25.concurrence - 1 / (omega - 1)) / 1e-9)
    errors.append(abs(g25.negativity - omega / (omega - 1) / 4) / 1e-9)
    errors.append(abs(g25.one_body_E / (2 * omega) - 1) / 1e-9)
    ratio = k_state_measures(omega, 2).concurrence / k1.concurrence
    errors.append(abs(ratio / (2 - math.sqrt(2)) - 1) / 0.02)
    worst = max(errors)
    return worst <= 1.0, worst, 1.0, f"C2/C1={ratio:.6f}"


def _two_level_oracle(p: ModelParams) -> tuple[float, float]:
    """(energy, f_+) of the omega = 2 even block diagonalized by hand."""
    h = lipkin.full_hamiltonian(p)
    a, d, b = h[0, 0], h[2, 2], h[0, 2]
    root = math.hypot((d - a) / 2, b)
    energy = (a + d) / 2 - root
    f_up = 0.5 * (1 - (d - a) / (2 * root)) if root > 0 else 0.0
    return energy, f_up


def omega_two_identities() -> tuple[bool, float, float, str]:
    tol = 1e-10
    worst = 0.0
    for chi in (-1.0, -0.5, 0.0, 0.5, 1.0):
        for vx in np.linspace(0.1, 5.0, 10):
            p = ModelParams(2, 1.0, float(vx), chi)
            gs = ground_state(p)
            m = state_measures(gs)
            f_up = spin_moments(gs).kmean / 2
            worst = max(
                worst,
                abs(m.concurrence - 2 * m.negativity),
                abs(m.one_body_E - 4 * m.updown_E),
                abs(m.one_body_E - 4 * binary_entropy(f_up)),
            )
    p = ModelParams(2, 1.0, 2.0, 0.0)
    m = state_measures(ground_state(p))
    _, f_up = _two_level_oracle(p)
    worst = max(worst, abs(m.concurrence - 1 / math.sqrt(2)), abs(m.one_body_E - 4 * binary_entropy(f_up)))
    return worst <= tol, worst, tol, f"E(vx=2)={m.one_body_E:.6f}"


def separability_point() -> tuple[bool, float, float, str]:
    omega, chi = 50, 0.5
    vs = math.sqrt(2.0)
    p = ModelParams(omega, 1.0, vs, chi)
    residual = lipkin.eigenstate_residual(p, mf_coefficients(math.acos(math.sqrt(0.5)), omega))
    res_ratio = residual / (1e-8 * hamiltonian_norm(p))
    lo, hi = math.floor(vs * 1000) / 1000, math.ceil(vs * 1000) / 1000
    m_lo = state_measures(ground_state(ModelParams(omega, 1.0, lo, chi)))
    m_hi = state_measures(ground_state(ModelParams(omega, 1.0, hi, chi)))
    m_ref = state_measures(ground_state(ModelParams(omega, 1.0, 1.3, chi)))
    c_ratio = max(m_lo.concurrence, m_hi.concurrence) / 1e-6
    flip = m_lo.concurrence_kind == PARALLEL and m_hi.concurrence_kind == ANTIPARALLEL
    drift = max(
        max(abs(m.negativity / m_ref.negativity - 1), abs(m.one_body_E / m_ref.one_body_E - 1))
        for m in (m_lo, m_hi)
    )
    drift_ratio = drift / 0.05
    worst = max(res_ratio, c_ratio, drift_ratio)
    detail = (
        f"residual/tol={res_ratio:.3g},C_bracket=({m_lo.concurrence:.3g},{m_hi.concurrence:.3g}),"
        f"kind_flip={flip},N_E_drift_vs_1.3={drift:.3g}"
    )
    return worst <= 1.0 and flip, worst, 1.0, detail


def mf_pmf_agreement() -> tuple[bool, float, float, str]:
    omega = 50
    e_rel, ud = 0.0, []
    for vx in np.linspace(1.5, 3.0, 16):
        p = ModelParams(omega, 1.0, float(vx), 0.5)
        m = state_measures(ground_state(p))
        theta = mf_solve(p).theta
        parity, _ = pmf_parity_at(p, theta)
        e_rel = max(e_rel, abs(m.one_body_E - pmf_measures(theta, omega, parity).one_body_E) / m.one_body_E)
        ud.append(m.updown_E - m.one_body_E / 2)
    neg = 0.0
    for vx, chi, scale in ((2.0, 0.5, 0.5), (3.0, 0.5, 0.5), (3.0, 1.0, 0.25)):
        p = ModelParams(omega, 1.0, vx, chi)
        n_exact = state_measures(ground_state(p)).negativity
        neg = max(neg, abs(n_exact - scale * math.sin(mf_solve(p).theta) ** 2))
    ud_ok = all(-1.5 <= d <= 0.5 for d in ud)
    worst = max(e_rel / 0.05, neg / 0.01)
    detail = f"E_rel={e_rel:.3g},N_dev={neg:.3g},Eud-E/2_range=[{min(ud):.3f},{max(ud):.3f}]"
    return worst <= 1.0 and ud_ok, worst, 1.0, detail


def _fig6_domain(chi: float) -> list[float]:
    grid = [round(v, 10) for v in np.concatenate([np.arange(0.1, 0.8001, 0.05), np.arange(1.3, 3.0001, 0.05)])]
    if chi > 0:
        vs = 1 / math.sqrt(chi)
        grid = [v for v in grid if abs(v - vs) >= SEPARABILITY_WINDOW]
    return grid


def rpa_concurrence() -> tuple[bool, float, float, str]:
    omega = 50
    arpa_worst, prpa_worst = 0.0, 0.0
    for chi in (0.0, 0.5):
        for vx in _fig6_domain(chi):
            p = ModelParams(omega, 1.0, vx, chi)
            exact = omega * state_measures(ground_state(p)).concurrence / 2
            arpa = omega * rpa_concurrence_asymptotic(p)[0] / 2
            prpa = omega * prpa_solve(p).measures.concurrence / 2
            arpa_worst = max(arpa_worst, abs(exact - arpa))
            prpa_worst = max(prpa_worst, abs(exact - prpa))
    through = [omega * prpa_solve(ModelParams(omega, 1.0, v, 0.0)).measures.concurrence / 2 for v in np.linspace(0.95, 1.05, 11)]
    finite = all(math.isfinite(c) for c in through)
    jump = float(np.max(np.abs(np.diff(through))))
    continuous = finite and jump <= 0.02
    worst = max(arpa_worst / 0.08, prpa_worst / 0.04)
    detail = f"ARPA={arpa_worst:.4f},PRPA={prpa_worst:.4f},PRPA_max_jump_near_eps={jump:.4f}"
    return worst <= 1.0 and continuous, worst, 1.0, detail


def pmfv_concurrence() -> tuple[bool, float, float, str]:
    omega = 50
    worst = 0.0
    collapsed = []
    for chi in (0.0, 0.5):
        for vx in (0.05, 0.1, 0.2, 0.3, 0.4):
            p = ModelParams(omega, 1.0, vx, chi)
            exact = state_measures(ground_state(p)).concurrence
            theta, parity, _ = pmfv_solve(p)
            worst = max(worst, abs(pmf_measures(theta, omega, parity).concurrence - exact) / exact)
        p = ModelParams(omega, 1.0, 2.0, chi)
        theta, parity, _ = pmfv_solve(p)
        collapsed.append(pmf_measures(theta, omega, parity).concurrence)
    detail = "C_pmfv(vx=2)=" + "/".join(f"{c:.3g}" for c in collapsed)
    return worst <= 0.15, worst, 0.15, detail


def saturation() -> tuple[bool, float, float, str]:
    omega, chi = 50, 0.5

    def measures(vx):
        m = state_measures(ground_state(ModelParams(omega, 1.0, vx, chi)))
        return m.one_body_E / (2 * omega), m.updown_E / omega

    e09, e2, e100 = measures(0.9)[0], measures(2.0)[0], measures(100.0)[0]
    gaps = [abs(e - u) for e, u in (measures(2.0), measures(3.0))]
    ratios = [e09 / 0.02, 0.5 / e2, 0.99 / e100, max(gaps) / 0.03]
    worst = max(ratios)
    detail = f"E_per_2omega(0.9)={e09:.4f},E_per_2omega(2)={e2:.4f},E_per_2omega(100)={e100:.5f},Eud_gap={max(gaps):.4f}"
    return worst < 1.0, worst, 1.0, detail


def determinism() -> tuple[bool, float, float, str]:
    """Write the fig1 table twice to files, as the figure command does."""
    digests, times = [], []
    with tempfile.TemporaryDirectory() as tmp:
        for run in range(2):
            path = os.path.join(tmp, f"fig1_{run}.csv")
            start = time.perf_counter()
            write_outputs(figure_preset("fig1", path), jobs=None)
            times.append(time.perf_counter() - start)
            with open(path, "rb") as fh:
                digests.append(hashlib.sha256(fh.read()).hexdigest())
    same = digests[0] == digests[1]
    return same and max(times) < 30.0, max(times), 30.0, f"identical={same},sha256={digests[0][:16]}"


CHECKS: dict[int, tuple[str, Callable, float | None]] = {
    1: ("isotropic_spectrum", isotropic_spectrum, 1.0),
    2: ("oracle_equivalence", oracle_equivalence, 30.0),
    3: ("point_values", point_values, None),
    4: ("omega_two_identities", omega_two_identities, None),
    5: ("separability_point", separability_point, None),
    6: ("mf_pmf_agreement", mf_pmf_agreement, None),
    7: ("rpa_concurrence", rpa_concurrence, None),
    8: ("pmfv_concurrence", pmfv_concurrence, None),
    9: ("saturation", saturation, None),
    10: ("determinism", determinism, None),
}


def run_check(number: int) -> CheckResult:
    name, fn, budget = CHECKS[number]
    res = _timed(number, name, fn)
    if budget is not None and res.runtime >= budget:
        return CheckResult(number, name, False, res.measured, res.tolerance, res.runtime, res.detail + f",over_budget={budget}s")
    return res


def quick_checks() -> list[CheckResult]:
    small = _timed(2, "oracle_equivalence_small", lambda: oracle_equivalence(tuple(range(3, 13))))
    return [run_check(1), small, run_check(3), run_check(4)]


def run_suite(level: str = "quick") -> list[CheckResult]:
    if level == "quick":
        return quick_checks()
    if level == "full":
        return [run_check(n) for n in sorted(CHECKS)]
    raise ValueError(f"unknown verification level {level!r} (quick or full)")
