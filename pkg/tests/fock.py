"""Explicit Jordan-Wigner fermion Fock space, used as an independent oracle.

Modes are ordered with all upper-level modes first (p+ for p = 0..omega-1),
then all lower-level modes, so the upper/lower bipartition is a plain tensor
split of the state vector.
"""

import numpy as np


def annihilators(n_modes):
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)
    ops = []
    for j in range(n_modes):
        m = np.array([[1.0]])
        for i in range(n_modes):
            m = np.kron(m, z if i < j else (a if i == j else eye))
        ops.append(m)
    return ops


class LipkinFock:
    def __init__(self, omega):
        self.omega = omega
        self.c = annihilators(2 * omega)
        self.cd = [x.T for x in self.c]
        up = lambda p: p  # noqa: E731
        dn = lambda p: omega + p  # noqa: E731
        self.up, self.dn = up, dn
        self.splus = sum(self.cd[up(p)] @ self.c[dn(p)] for p in range(omega))
        self.sminus = self.splus.T
        self.sz = 0.5 * sum(self.cd[up(p)] @ self.c[up(p)] - self.cd[dn(p)] @ self.c[dn(p)] for p in range(omega))
        self.number = sum(self.cd[j] @ self.c[j] for j in range(2 * omega))
        vac = np.zeros(4**omega)
        vac[0] = 1.0
        ref = vac
        for p in range(omega):
            ref = self.cd[dn(p)] @ ref
        self.reference = ref / np.linalg.norm(ref)

    def hamiltonian(self, eps, vx, chi):
        Vx = vx / (self.omega - 1)
        sx = 0.5 * (self.splus + self.sminus)
        sy2 = -0.25 * (self.splus - self.sminus) @ (self.splus - self.sminus)
        return eps * self.sz - Vx * (sx @ sx + chi * sy2) + Vx * (1 + chi) * self.number / 4

    def k_state(self, k):
        v = self.reference
        for _ in range(k):
            v = self.splus @ v
        return v / np.linalg.norm(v)

    def embed(self, coeffs):
        return sum(c * self.k_state(k) for k, c in enumerate(coeffs) if c != 0.0)

    def one_body_entropy(self, psi):
        n = 2 * self.omega
        rho = np.array([[psi @ self.cd[i] @ self.c[j] @ psi for j in range(n)] for i in range(n)])
        lam = np.clip(np.linalg.eigvalsh(rho), 0.0, 1.0)
        lam = lam[(lam > 1e-15) & (lam < 1 - 1e-15)]
        return float(-np.sum(lam * np.log2(lam) + (1 - lam) * np.log2(1 - lam)))

    def updown_entropy(self, psi):
        dim = 2**self.omega
        s = np.linalg.svd(psi.reshape(dim, dim), compute_uv=False) ** 2
        s = s[s > 1e-300]
        return float(-np.sum(s * np.log2(s)))

    def pair_entries(self, psi, p=0, q=1):
        """|<.>| of the two-site correlators behind the X-form pair state."""
        cd, c, up, dn = self.cd, self.c, self.up, self.dn
        n = lambda j: cd[j] @ c[j]  # noqa: E731
        ev = lambda op: float(psi @ op @ psi)  # noqa: E731
        s_p = cd[up(p)] @ c[dn(p)]
        return {
            "a_pp": ev(n(up(p)) @ n(up(q))),
            "a_pm": ev(n(up(p)) @ n(dn(q))),
            "a_mm": ev(n(dn(p)) @ n(dn(q))),
            "b_par": abs(ev(s_p @ cd[up(q)] @ c[dn(q)])),
            "b_anti": abs(ev(s_p @ cd[dn(q)] @ c[up(q)])),
        }
