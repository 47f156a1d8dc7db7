import math

import numpy as np
import pytest
from fock import LipkinFock

from lipkin_ent.lipkin import (
    ModelError,
    ModelParams,
    block_levels,
    build_hamiltonian,
    eigenstate_residual,
    expectation,
    full_hamiltonian,
    ground_state,
    hamiltonian_norm,
    isotropic_energy,
    isotropic_gs_level,
    spin_moments,
)
from lipkin_ent.numerics import eig_sym_tridiagonal


def spin_hamiltonian(p):
    """Dense H from explicit spin matrices (complex Sy), a second construction."""
    s = p.omega / 2
    m = np.arange(p.omega + 1) - s
    sp = np.zeros((p.omega + 1, p.omega + 1), dtype=complex)
    sp[np.arange(1, p.omega + 1), np.arange(p.omega)] = np.sqrt(s * (s + 1) - m[:-1] * (m[:-1] + 1))
    sx = (sp + sp.conj().T) / 2
    sy = (sp - sp.conj().T) / 2j
    h = p.eps * np.diag(m) - p.Vx * (sx @ sx + p.chi * sy @ sy) + p.constant * np.eye(p.omega + 1)
    assert np.allclose(h.imag, 0)
    return h.real


@pytest.mark.parametrize("omega", [2, 3, 6, 11])
@pytest.mark.parametrize("chi", [-1.0, -0.3, 0.0, 0.5, 1.0])
def test_hamiltonian_matches_spin_matrices(omega, chi):
    p = ModelParams(omega, 1.3, 2.1, chi)
    assert np.allclose(full_hamiltonian(p), spin_hamiltonian(p), atol=1e-13)


@pytest.mark.parametrize("omega", [2, 3, 4])
@pytest.mark.parametrize("chi", [-1.0, 0.0, 0.5, 1.0])
@pytest.mark.parametrize("vx", [0.0, 0.7, 2.3])
def test_ground_state_is_fermion_eigenstate(omega, chi, vx):
    fock = LipkinFock(omega)
    p = ModelParams(omega, 1.0, vx, chi)
    gs = ground_state(p)
    psi = fock.embed(gs.coeffs)
    h = fock.hamiltonian(1.0, vx, chi)
    assert np.linalg.norm(h @ psi - gs.energy * psi) < 1e-12
    assert abs(psi @ fock.number @ psi - omega) < 1e-12


@pytest.mark.parametrize("omega", [2, 3, 4])
@pytest.mark.parametrize("chi", [0.0, 0.5, 1.0])
def test_ground_energy_is_lowest_at_half_filling(omega, chi):
    fock = LipkinFock(omega)
    h = fock.hamiltonian(1.0, 1.7, chi)
    n = np.diag(fock.number)
    sector = np.flatnonzero(np.abs(n - omega) < 1e-9)
    lowest = np.linalg.eigvalsh(h[np.ix_(sector, sector)])[0]
    assert ground_state(ModelParams(omega, 1.0, 1.7, chi)).energy == pytest.approx(lowest, abs=1e-12)


def test_blocks_reassemble_full_matrix():
    p = ModelParams(7, 1.0, 1.4, 0.2)
    h = full_hamiltonian(p)
    for parity in (1, -1):
        ks = block_levels(7, parity)
        assert np.allclose(build_hamiltonian(p, parity).to_dense(), h[np.ix_(ks, ks)])
    odd = np.add.outer(np.arange(8), np.arange(8)) % 2 == 1
    assert np.all(h[odd] == 0.0)


def test_spectrum_matches_numpy():
    p = ModelParams(30, 1.0, 2.5, -0.4)
    values = []
    for parity in (1, -1):
        values.extend(eig_sym_tridiagonal(build_hamiltonian(p, parity)).values)
    assert np.allclose(np.sort(values), np.linalg.eigvalsh(full_hamiltonian(p)), atol=1e-12)


def test_noninteracting_ground_state():
    gs = ground_state(ModelParams(8, 2.0, 0.0, 0.3))
    assert gs.energy == pytest.approx(-8.0)
    assert gs.coeffs[0] == 1.0 and gs.parity == 1 and not gs.degenerate


def test_ground_state_sign_and_norm():
    gs = ground_state(ModelParams(9, 1.0, 3.0, 0.0))
    nz = np.flatnonzero(gs.coeffs)
    assert gs.coeffs[nz[0]] > 0
    assert np.linalg.norm(gs.coeffs) == pytest.approx(1.0, abs=1e-14)
    assert expectation(ModelParams(9, 1.0, 3.0, 0.0), gs.coeffs) == pytest.approx(gs.energy, abs=1e-12)


@pytest.mark.parametrize("omega", [2, 5, 12, 50])
def test_isotropic_spectrum_closed_form(omega):
    p = ModelParams(omega, 1.0, 2.2, 1.0)
    h = full_hamiltonian(p)
    assert np.allclose(np.diag(h), [isotropic_energy(p, k) for k in range(omega + 1)], rtol=1e-13)
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0


def test_isotropic_level_thresholds_and_ties():
    omega = 10
    for k in range(omega // 2):
        vx_k = (omega - 1) / (omega - 1 - 2 * k)
        assert isotropic_gs_level(ModelParams(omega, 1.0, vx_k * (1 - 1e-9), 1.0)) == (k, False)
        assert isotropic_gs_level(ModelParams(omega, 1.0, vx_k * (1 + 1e-9), 1.0)) == (k + 1, False)
        tie = isotropic_gs_level(ModelParams(omega, 1.0, vx_k, 1.0))
        assert tie.degenerate and tie.k == k
    assert isotropic_gs_level(ModelParams(omega, 1.0, 1e6, 1.0)).k == omega // 2
    with pytest.raises(ModelError):
        isotropic_gs_level(ModelParams(omega, 1.0, 1.0, 0.5))


def test_degenerate_tie_prefers_even_parity():
    omega = 10
    p = ModelParams(omega, 1.0, (omega - 1) / (omega - 1), 1.0)
    gs = ground_state(p)
    assert gs.degenerate and gs.parity == 1


def test_spin_moments_of_basis_states():
    c = np.zeros(7)
    c[2] = 1.0
    m = spin_moments(c)
    assert (m.sz, m.sz2, m.splus2, m.kmean) == (-1.0, 1.0, 0.0, 2.0)
    with pytest.raises(ModelError):
        spin_moments(c, 5)


def test_residual_and_norm():
    p = ModelParams(12, 1.0, 1.5, 0.3)
    assert eigenstate_residual(p, ground_state(p).coeffs) < 1e-12
    assert hamiltonian_norm(p) == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(full_hamiltonian(p)))))
    flat = np.ones(13) / math.sqrt(13)
    assert eigenstate_residual(p, flat) > 0.1


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(omega=0),
        dict(omega=2.5),
        dict(omega=4, eps=0.0),
        dict(omega=4, vx=-1.0),
        dict(omega=4, chi=1.5),
        dict(omega=4, vx=math.inf),
        dict(omega=1, vx=1.0),
    ],
)
def test_invalid_parameters(kwargs):
    with pytest.raises(ModelError):
        ModelParams(**kwargs)


def test_derived_couplings():
    p = ModelParams(5, 1.0, 2.0, 0.5)
    assert p.Vx == 0.5 and p.W == pytest.approx(0.375) and p.V == pytest.approx(0.125)
    assert p.vy == 1.0 and p.constant == pytest.approx(0.5 * 1.5 * 5 / 4)
    assert ModelParams(1).Vx == 0.0
