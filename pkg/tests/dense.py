"""Brute-force dense oracles.

Everything here is assembled from explicit DFT matrices and Kronecker
products, independently of the FFT-based package code. Fields are flattened
row-major (index ``i * ny + j``, x along the first axis).
"""
import numpy as np


def dft_matrix(n):
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n)


def wave_numbers(n, length, drop_nyquist=True):
    m = np.array([j if j < n / 2 else j - n for j in range(n)], dtype=float)
    if drop_nyquist:
        m[n // 2] = 0.0
    else:
        m[n // 2] = n / 2
    return 2 * np.pi / length * m, m


def diff_matrix_1d(n, length, order=1, drop_nyquist=True):
    """Real n x n spectral differentiation matrix ``W^-1 diag((ik)^order) W``."""
    W = dft_matrix(n)
    k, _ = wave_numbers(n, length, drop_nyquist)
    D = np.linalg.inv(W) @ np.diag((1j * k) ** order) @ W
    assert np.max(np.abs(D.imag)) < 1e-10
    return D.real


def mask_matrix_1d(n):
    """Projection onto wave indices ``|m| < n/3``."""
    W = dft_matrix(n)
    m = np.array([j if j < n / 2 else j - n for j in range(n)])
    keep = (np.abs(m) < n / 3).astype(float)
    return (np.linalg.inv(W) @ np.diag(keep) @ W).real


class DenseOps:
    """Dense operator matrices for an (nx, ny) periodic grid."""

    def __init__(self, nx, ny, lx=2 * np.pi, ly=2 * np.pi):
        self.nx, self.ny, self.lx, self.ly = nx, ny, lx, ly
        Ix, Iy = np.eye(nx), np.eye(ny)
        self.Dx = np.kron(diff_matrix_1d(nx, lx), Iy)
        self.Dy = np.kron(Ix, diff_matrix_1d(ny, ly))
        self.L = self.Dx @ self.Dx + self.Dy @ self.Dy
        # Laplacian with the full (Nyquist-including) symbol
        self.L_full = np.kron(diff_matrix_1d(nx, lx, 2, False), Iy) + np.kron(Ix, diff_matrix_1d(ny, ly, 2, False))
        self.M = np.kron(mask_matrix_1d(nx), mask_matrix_1d(ny))
        self.N = nx * ny
        self.cell = (lx / nx) * (ly / ny)

    # shape helpers
    def flat(self, f):
        return np.asarray(f, dtype=float).reshape(-1)

    def field(self, v):
        return np.asarray(v).reshape(self.nx, self.ny)

    def grad(self, f):
        f = self.flat(f)
        return [self.Dx @ f, self.Dy @ f]

    def div(self, v):
        return self.Dx @ v[0] + self.Dy @ v[1]

    def vel_grad(self, u):
        """``G[i][j] = d_j u_i``, flat."""
        D = (self.Dx, self.Dy)
        return [[D[j] @ u[i] for j in range(2)] for i in range(2)]

    def sym_grad(self, u):
        G = self.vel_grad(u)
        return [[0.5 * (G[i][j] + G[j][i]) for j in range(2)] for i in range(2)]

    def tensor_div(self, T):
        return [self.Dx @ T[i][0] + self.Dy @ T[i][1] for i in range(2)]

    def integrate(self, f):
        return self.cell * float(np.sum(f))

    def leray(self, w):
        """Returns (P w, psi) using the Moore-Penrose inverse of the Laplacian."""
        Lp = np.linalg.pinv(self.L, rcond=1e-10)
        psi = Lp @ self.div(w)
        return [w[0] - self.Dx @ psi, w[1] - self.Dy @ psi], psi


# -- constitutive laws, written out independently -------------------------------

def Q(theta, delta):
    return theta ** (delta + 1) / (delta + 1)


def Qinv(q, delta):
    return ((delta + 1) * q) ** (1 / (delta + 1))


def khat(theta, beta):
    return theta + theta ** (beta + 1) / (beta + 1)


def nu(theta, nu0, nu1):
    return nu0 + nu1 / (1 + theta)


# -- step oracles --------------------------------------------------------------

def ch_step_oracle(ops, phi, u, theta, dt, eps=1.0, S=2.0):
    phi, theta = ops.flat(phi), ops.flat(theta)
    u = [ops.flat(u[0]), ops.flat(u[1])]
    I = np.eye(ops.N)
    N = ops.M @ (phi**3 - phi) / eps - theta
    gp = ops.grad(phi)
    A = ops.M @ (u[0] * gp[0] + u[1] * gp[1])
    lhs = I + dt * eps * ops.L @ ops.L - dt * S * ops.L
    rhs = (I - dt * S * ops.L) @ phi + dt * ops.L @ N - dt * A
    new = np.linalg.solve(lhs, rhs)
    new += phi.mean() - new.mean()
    return ops.field(new)


def ns_step_oracle(ops, u, phi, theta, dt, eps=1.0, nu0=0.05, nu1=0.1):
    u = [ops.flat(u[0]), ops.flat(u[1])]
    phi, theta = ops.flat(phi), ops.flat(theta)
    n = nu(theta, nu0, nu1)
    nbar = n.mean()
    G = ops.vel_grad(u)
    conv = [ops.M @ (u[0] * G[i][0] + u[1] * G[i][1]) for i in range(2)]
    gp = ops.grad(phi)
    cap = ops.tensor_div([[ops.M @ (gp[i] * gp[j]) for j in range(2)] for i in range(2)])
    Du = ops.sym_grad(u)
    visc = ops.tensor_div([[ops.M @ ((n - nbar) * Du[i][j]) for j in range(2)] for i in range(2)])
    w = [u[i] + dt * (-conv[i] - eps * cap[i] + visc[i]) for i in range(2)]
    Pw, psi = ops.leray(w)
    A = np.eye(ops.N) - 0.5 * dt * nbar * ops.L
    new = [np.linalg.solve(A, Pw[i]) for i in range(2)]
    return np.stack([ops.field(new[0]), ops.field(new[1])]), ops.field(psi / dt)


def heat_explicit_oracle(ops, theta, u, phi_old, phi_new, mu, dt, delta=0.75, nu0=0.05, nu1=0.1):
    theta = ops.flat(theta)
    u = [ops.flat(u[0]), ops.flat(u[1])]
    phi_old, phi_new, mu = ops.flat(phi_old), ops.flat(phi_new), ops.flat(mu)
    q0 = Q(theta, delta)
    gq = ops.grad(q0)
    adv = ops.M @ (u[0] * gq[0] + u[1] * gq[1])
    Du = ops.sym_grad(u)
    du2 = sum(Du[i][j] ** 2 for i in range(2) for j in range(2))
    gm = ops.grad(mu)
    src = nu(theta, nu0, nu1) * du2 + gm[0] ** 2 + gm[1] ** 2
    gp = ops.grad(phi_old)
    dphidt = (phi_new - phi_old) / dt + ops.M @ (u[0] * gp[0] + u[1] * gp[1])
    return q0 + dt * (src - theta * dphidt - adv)


def heat_step_oracle(ops, theta, u, phi_old, phi_new, mu, dt, delta=0.75, beta=2.0, nu0=0.05, nu1=0.1):
    """Solve ``Q(th) - dt L khat(th) = q*`` by Newton's method with a dense Jacobian."""
    q_star = heat_explicit_oracle(ops, theta, u, phi_old, phi_new, mu, dt, delta, nu0, nu1)
    th = ops.flat(theta).copy()
    for _ in range(100):
        F = Q(th, delta) - q_star - dt * ops.L @ khat(th, beta)
        J = np.diag(th**delta) - dt * ops.L @ np.diag(1 + th**beta)
        step = np.linalg.solve(J, -F)
        th = th + step
        if np.max(np.abs(step)) < 1e-15:
            break
    q_new = q_star + dt * ops.L @ khat(th, beta)
    return ops.field(Qinv(q_new, delta))
