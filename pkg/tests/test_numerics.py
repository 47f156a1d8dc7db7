import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from lipkin_ent.numerics import (
    InvalidInputError,
    NotPSDError,
    SymTriMatrix,
    collective_rotation,
    eig_sym_dense,
    eig_sym_tridiagonal,
    expm_antisymmetric,
    ladder_pair,
    ladder_single,
    log_binomial,
    log_binomial_row,
    safe_pow,
    signed_log_pow,
    sqrtm_psd,
)

finite = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30).flatmap(lambda n: st.tuples(st.lists(finite, min_size=n, max_size=n), st.lists(finite, min_size=n - 1, max_size=n - 1))))
def test_tridiagonal_matches_scipy_and_reconstructs(data):
    d, e = map(np.array, data)
    m = SymTriMatrix(d, e)
    dec = eig_sym_tridiagonal(m)
    ref = sla.eigh_tridiagonal(d, e, eigvals_only=True)
    scale = max(1.0, np.max(np.abs(ref)))
    assert np.allclose(dec.values, ref, atol=1e-11 * scale)
    v = dec.vectors
    assert np.allclose(v.T @ v, np.eye(d.size), atol=1e-12)
    assert np.allclose(v @ np.diag(dec.values) @ v.T, m.to_dense(), atol=1e-11 * scale)


def test_tridiagonal_exact_degeneracy_and_zero_couplings():
    m = SymTriMatrix(np.array([2.0, 2.0, -1.0, 2.0]), np.array([0.0, 0.0, 0.0]))
    dec = eig_sym_tridiagonal(m)
    assert list(dec.values) == [-1.0, 2.0, 2.0, 2.0]
    single = eig_sym_tridiagonal(SymTriMatrix(np.array([3.5]), np.zeros(0)))
    assert single.values[0] == 3.5 and single.vectors[0, 0] == 1.0


def test_tridiagonal_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        SymTriMatrix(np.array([1.0, 2.0]), np.array([1.0, 2.0]))
    with pytest.raises(InvalidInputError):
        SymTriMatrix(np.array([1.0, np.nan]), np.array([0.0]))
    with pytest.raises(InvalidInputError):
        SymTriMatrix(np.zeros(0), np.zeros(0))


def test_matvec_matches_dense():
    rng = np.random.default_rng(3)
    m = SymTriMatrix(rng.normal(size=7), rng.normal(size=6))
    x = rng.normal(size=7)
    assert np.allclose(m.matvec(x), m.to_dense() @ x)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(0, 10_000))
def test_dense_jacobi_matches_numpy(n, seed):
    a = np.random.default_rng(seed).normal(size=(n, n))
    a = a + a.T
    dec = eig_sym_dense(a)
    assert np.allclose(dec.values, np.linalg.eigvalsh(a), atol=1e-12 * max(1, np.abs(a).max()))
    assert np.allclose(dec.vectors @ np.diag(dec.values) @ dec.vectors.T, a, atol=1e-11)


def test_dense_jacobi_keeps_block_zeros_exact():
    a = np.zeros((4, 4))
    a[0, 0], a[3, 3] = 0.3, 0.2
    a[0, 3] = a[3, 0] = 0.1
    a[1, 1] = a[2, 2] = 0.25
    a[1, 2] = a[2, 1] = 0.05
    v = eig_sym_dense(a).vectors
    for col in v.T:
        assert np.all(col[[0, 3]] == 0.0) or np.all(col[[1, 2]] == 0.0)


def test_dense_rejects_asymmetric_and_nonfinite():
    with pytest.raises(InvalidInputError):
        eig_sym_dense(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        eig_sym_dense(np.array([[np.inf]]))
    with pytest.raises(InvalidInputError):
        eig_sym_dense(np.ones((2, 3)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000))
def test_sqrtm_of_projector_is_projector(n, seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    rank = rng.integers(0, n + 1)
    proj = q[:, :rank] @ q[:, :rank].T
    assert np.allclose(sqrtm_psd(proj), proj, atol=1e-12)


def test_sqrtm_squares_back_and_matches_scipy():
    rng = np.random.default_rng(7)
    b = rng.normal(size=(5, 5))
    a = b @ b.T
    s = sqrtm_psd(a)
    assert np.allclose(s @ s, a, atol=1e-11)
    assert np.allclose(s, np.real(sla.sqrtm(a)), atol=1e-9)


def test_sqrtm_clamps_roundoff_but_rejects_negative():
    assert np.allclose(sqrtm_psd(np.diag([1.0, -1e-12])), np.diag([1.0, 0.0]))
    with pytest.raises(NotPSDError):
        sqrtm_psd(np.diag([1.0, -1e-3]))


@given(st.integers(0, 400).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))))
def test_log_binomial_matches_exact_integers(nk):
    n, k = nk
    exact = math.log(math.comb(n, k))
    assert abs(log_binomial(n, k) - exact) <= 1e-12 * max(1.0, exact)
    assert log_binomial(n, k) == log_binomial(n, n - k)


def test_log_binomial_row_and_domain():
    assert np.allclose(np.exp(log_binomial_row(6)), [1, 6, 15, 20, 15, 6, 1])
    for bad in ((-1, 0), (3, 4), (3, -1)):
        with pytest.raises(ValueError):
            log_binomial(*bad)
    assert math.isfinite(log_binomial(10**6, 5 * 10**5))


def test_signed_powers_underflow_cleanly():
    assert signed_log_pow(-0.5, 3)[0] == -1.0
    assert signed_log_pow(-0.5, 4)[0] == 1.0
    assert signed_log_pow(0.0, 0) == (1.0, 0.0)
    assert safe_pow(0.5, 3) == pytest.approx(0.125, rel=1e-15)
    assert safe_pow(1e-3, 500) == 0.0
    assert safe_pow(-2.0, 3) == pytest.approx(-8.0, rel=1e-15)


def _spin_matrices(omega):
    up = np.zeros((omega + 1, omega + 1))
    idx = np.arange(omega)
    up[idx + 1, idx] = ladder_single(omega)
    return up


@pytest.mark.parametrize("omega", [1, 2, 5, 12])
def test_ladders_satisfy_su2_algebra(omega):
    sp = _spin_matrices(omega)
    sz = np.diag(np.arange(omega + 1) - omega / 2)
    assert np.allclose(sp @ sp.T - sp.T @ sp, 2 * sz)
    sq = sp @ sp
    if omega >= 2:
        assert np.allclose(np.diag(sq, -2), ladder_pair(omega))


@pytest.mark.parametrize("omega", [1, 4, 9])
def test_rotation_matches_scipy_expm(omega):
    sp = _spin_matrices(omega)
    gen = 0.5 * (sp - sp.T)
    for theta in (0.0, 0.3, 1.7, math.pi):
        assert np.allclose(collective_rotation(omega, theta), sla.expm(theta * gen), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 20), st.floats(-3, 3), st.floats(-3, 3))
def test_rotation_group_law_and_orthogonality(omega, a, b):
    ra, rb = collective_rotation(omega, a), collective_rotation(omega, b)
    assert np.allclose(ra @ rb, collective_rotation(omega, a + b), atol=1e-11)
    assert np.allclose(ra.T @ ra, np.eye(omega + 1), atol=1e-12)


def test_rotation_first_column_is_binomial():
    omega, theta = 10, 1.1
    col = collective_rotation(omega, theta)[:, 0]
    k = np.arange(omega + 1)
    ref = np.sqrt([math.comb(omega, int(i)) for i in k]) * math.cos(theta / 2) ** (omega - k) * math.sin(theta / 2) ** k
    assert np.allclose(col, ref, atol=1e-13)


def test_rotation_is_not_mutated_through_cache():
    r = collective_rotation(3, 0.4)
    r[0, 0] = 99.0
    assert collective_rotation(3, 0.4)[0, 0] != 99.0


def test_rotation_rejects_bad_arguments():
    with pytest.raises(InvalidInputError):
        collective_rotation(0, 0.1)
    with pytest.raises(InvalidInputError):
        collective_rotation(3, math.nan)


def test_expm_antisymmetric_large_norm():
    g = np.array([[0.0, -40.0], [40.0, 0.0]])
    assert np.allclose(expm_antisymmetric(g), sla.expm(g), atol=1e-11)
