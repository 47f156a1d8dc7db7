"""Small dense linear-algebra kernel used by the Lipkin solver.

Everything here works on real matrices of modest size (a few hundred at
most).  The eigensolvers are written out explicitly instead of calling
LAPACK so that exact zeros and exact degeneracies in the structured reduced
density matrices survive the decomposition untouched; the concurrence oracle
relies on that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PSD_CLAMP = 1e-10
PSD_FAIL = 1e-8


class InvalidInputError(ValueError):
    """Raised for non-finite, inconsistent, or out-of-domain matrix input."""


class NotPSDError(InvalidInputError):
    """Raised when a matrix expected to be positive semidefinite is not."""


@dataclass(frozen=True)
class SymTriMatrix:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).reshape(-1)
        e = np.asarray(self.offdiag, dtype=float).reshape(-1)
        if d.size < 1:
            raise InvalidInputError("tridiagonal matrix must have n >= 1")
        if e.size != d.size - 1:
            raise InvalidInputError(
                f"offdiag length {e.size} inconsistent with diag length {d.size}"
            )
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise InvalidInputError("non-finite tridiagonal entries")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.n > 1:
            idx = np.arange(self.n - 1)
            a[idx, idx + 1] = self.offdiag
            a[idx + 1, idx] = self.offdiag
        return a

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        if self.n > 1:
            y[:-1] += self.offdiag * x[1:]
            y[1:] += self.offdiag * x[:-1]
        return y


@dataclass(frozen=True)
class EigDecomposition:
    values: np.ndarray
    vectors: np.ndarray  # columns


def _sorted(values: np.ndarray, vectors: np.ndarray) -> EigDecomposition:
    order = np.argsort(values, kind="stable")
    return EigDecomposition(values[order].copy(), vectors[:, order].copy())


def eig_sym_tridiagonal(m: SymTriMatrix) -> EigDecomposition:
    """Full spectrum of a symmetric tridiagonal matrix by implicit-shift QL."""
    n = m.n
    d = m.diag.copy()
    e = np.zeros(n)
    e[: n - 1] = m.offdiag
    z = np.eye(n)
    eps = np.finfo(float).eps
    # absolute floor so couplings that are tiny against the whole matrix still
    # deflate when the neighbouring diagonal entries vanish
    floor = eps * eps * (np.max(np.abs(d)) + np.max(np.abs(e), initial=0.0))
    for l in range(n):
        it = 0
        while True:
            mm = l
            while mm < n - 1:
                dd = abs(d[mm]) + abs(d[mm + 1])
                if abs(e[mm]) <= eps * dd or abs(e[mm]) <= floor:
                    break
                mm += 1
            if mm == l:
                break
            it += 1
            if it > 60:
                raise InvalidInputError("tridiagonal QL failed to converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[mm] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = mm - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[mm] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                z[:, i] = c * zi - s * z[:, i + 1]
                z[:, i + 1] = s * zi + c * z[:, i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[mm] = 0.0
    return _sorted(d, z)


def _check_symmetric(a: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("non-finite matrix entries")
    scale = max(np.max(np.abs(a)), 1e-300) if a.size else 1.0
    if np.max(np.abs(a - a.T), initial=0.0) > rtol * scale:
        raise InvalidInputError("matrix is not symmetric within tolerance")
    return 0.5 * (a + a.T)


def eig_sym_dense(m: np.ndarray, tol: float = 1e-14) -> EigDecomposition:
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Rotations are skipped for pairs whose off-diagonal element is exactly zero,
    so block structure in the input is preserved bit-for-bit.
    """
    a = _check_symmetric(m).copy()
    n = a.shape[0]
    v = np.eye(n)
    if n == 0:
        return EigDecomposition(np.zeros(0), v)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(100):
        off = math.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) < 1e-300:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    else:
        raise InvalidInputError("Jacobi sweeps did not converge")
    return _sorted(np.diag(a).copy(), v)


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    """Principal square root of a symmetric positive semidefinite matrix.

    Eigenvalues in [-1e-8, 0) are treated as roundoff and clamped to zero.
    """
    dec = eig_sym_dense(m)
    lam = dec.values
    if lam.size and lam[0] < -PSD_FAIL:
        raise NotPSDError(f"matrix has eigenvalue {lam[0]:.3e} < -{PSD_FAIL:g}")
    root = np.sqrt(np.clip(lam, 0.0, None))
    s = (dec.vectors * root) @ dec.vectors.T
    return 0.5 * (s + s.T)


def log_binomial(n: int, k: int) -> float:
    """Natural log of the binomial coefficient C(n, k)."""
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"log_binomial requires 0 <= k <= n, got n={n}, k={k}")
    k = min(k, n - k)
    if k == 0:
        return 0.0
    return math.lgamma(n + 1) - (math.lgamma(k + 1) + math.lgamma(n - k + 1))


def log_binomial_row(n: int) -> np.ndarray:
    """ln C(n, k) for k = 0..n as an array."""
    return np.array([log_binomial(n, k) for k in range(n + 1)])


def signed_log_pow(x: float, n: int) -> tuple[float, float]:
    """Return (sign, log|x|**n) so that x**n = sign * exp(logabs)."""
    if x == 0.0:
        return (0.0 if n > 0 else 1.0), (-math.inf if n > 0 else 0.0)
    sign = 1.0 if (x > 0 or n % 2 == 0) else -1.0
    return sign, n * math.log(abs(x))


def safe_pow(x: float, n: int) -> float:
    """x**n evaluated through logs; underflows cleanly to 0."""
    sign, lg = signed_log_pow(x, n)
    return sign * math.exp(lg) if lg > -745.0 else 0.0


def ladder_pair(omega: int) -> np.ndarray:
    """<K+2| S+^2 |K> for K = 0..omega-2 in the maximal-spin multiplet."""
    s = omega / 2.0
    k = np.arange(max(omega - 1, 0), dtype=float)
    mz = k - s
    return np.sqrt((s - mz) * (s + mz + 1.0)) * np.sqrt((s - mz - 1.0) * (s + mz + 2.0))


def ladder_single(omega: int) -> np.ndarray:
    """<K+1| S+ |K> for K = 0..omega-1."""
    s = omega / 2.0
    mz = np.arange(omega, dtype=float) - s
    return np.sqrt((s - mz) * (s + mz + 1.0))


def expm_antisymmetric(a: np.ndarray) -> np.ndarray:
    """exp(a) for a real matrix by scaling and squaring of a Taylor series."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    norm = np.max(np.sum(np.abs(a), axis=0)) if n else 0.0
    squarings = max(0, int(math.ceil(math.log2(norm / 0.25)))) if norm > 0.25 else 0
    b = a / (2.0**squarings)
    result = np.eye(n)
    term = np.eye(n)
    for j in range(1, 40):
        term = term @ b / j
        result = result + term
        if np.max(np.abs(term)) < 1e-18:
            break
    for _ in range(squarings):
        result = result @ result
    return result


def collective_rotation(omega: int, theta: float) -> np.ndarray:
    """Rotation of the spin-omega/2 multiplet about y in the |K> basis.

    Returns exp(theta * (S+ - S-)/2); column 0 is the rotated reference state
    with non-negative binomial amplitudes for theta in [0, pi].
    """
    if omega < 1:
        raise InvalidInputError("collective_rotation requires omega >= 1")
    if not math.isfinite(theta):
        raise InvalidInputError("non-finite rotation angle")
    return _cached_rotation(int(omega), float(theta)).copy()


@lru_cache(maxsize=256)
def _cached_rotation(omega: int, theta: float) -> np.ndarray:
    g = np.zeros((omega + 1, omega + 1))
    up = ladder_single(omega)
    idx = np.arange(omega)
    g[idx + 1, idx] = 0.5 * up
    g[idx, idx + 1] = -0.5 * up
    r = expm_antisymmetric(theta * g)
    r.setflags(write=False)
    return r
