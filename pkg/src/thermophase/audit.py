"""Thermodynamic audit: conserved and monotone quantities, weak-form residuals,
and a-priori norm monitors over a trajectory.

Space integrals use the rectangle rule. The weak energy and entropy checks
integrate in time with the trapezoid rule; the a-priori monitors use a left
Riemann sum.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import grid as gr
from .constitutive import (
    conductivity,
    double_well,
    entropy_density,
    entropy_flux_potential,
    kirchhoff,
    require_positive,
    thermal_energy,
    viscosity,
)

CSV_COLUMNS = (
    "t", "dt", "mean_phi", "kinetic", "grad_energy", "potential", "thermal",
    "total_energy", "entropy", "entropy_production", "theta_min", "theta_max",
    "umax", "div_norm",
)


@dataclass
class DiagRecord:
    t: float
    dt: float
    mean_phi: float
    kinetic: float
    grad_energy: float
    potential: float
    thermal: float
    total_energy: float
    entropy: float
    entropy_production: float
    theta_min: float
    theta_max: float
    umax: float
    div_norm: float

    def as_row(self):
        return [getattr(self, c) for c in CSV_COLUMNS]


@dataclass
class BoundReport:
    Q_Linf_L1: float
    u_Linf_L2: float
    F_Linf_L1: float
    phi_Linf_H1: float
    theta_Linf_Ldelta1: float
    invsqrt_theta_Du_L2: float
    invsqrt_theta_gradmu_L2: float
    kappa_over_theta2_gradtheta2_L1: float
    gradtheta_L2: float
    gradlogtheta_L2: float
    gradthetabeta2_L2: float
    theta_Lbeta_L3beta: float
    Du_L2: float
    gradmu_L2: float
    mu_L2H1: float
    theta_Lp: float

    def as_dict(self):
        return dataclasses.asdict(self)

    def all_finite(self):
        return all(np.isfinite(v) for v in self.as_dict().values())


def _sq(v):
    """Pointwise squared Euclidean/Frobenius norm over leading component axes."""
    out = v**2
    while out.ndim > 2:
        out = out.sum(axis=0)
    return out


def entropy_production_density(state, g, p, contraction="sym"):
    """``nu |Du|^2/theta + |grad mu|^2/theta + kappa |grad theta|^2/theta^2``.

    ``contraction="full"`` replaces ``|Du|^2`` by ``|grad u|^2``.
    """
    theta = require_positive(state.theta)
    if contraction == "sym":
        vel = _sq(gr.sym_gradient(state.u, g))
    elif contraction == "full":
        vel = _sq(gr.velocity_gradient(state.u, g))
    else:
        raise ValueError(f"unknown contraction {contraction!r}")
    dmu = _sq(gr.gradient(state.mu, g))
    dth = _sq(gr.gradient(theta, g))
    return (viscosity(theta, p) * vel + dmu) / theta + conductivity(theta, p) * dth / theta**2


def diagnostics(state, g, p, dt=0.0):
    theta = require_positive(state.theta)
    F, _, _ = double_well(state.phi)
    kinetic = float(gr.integrate(0.5 * _sq(state.u), g))
    grad_energy = float(gr.integrate(0.5 * p.epsilon * _sq(gr.gradient(state.phi, g)), g))
    potential = float(gr.integrate(F, g)) / p.epsilon
    thermal = float(gr.integrate(thermal_energy(theta, p), g))
    return DiagRecord(
        t=float(state.t),
        dt=float(dt),
        mean_phi=float(gr.mean(state.phi, g)),
        kinetic=kinetic,
        grad_energy=grad_energy,
        potential=potential,
        thermal=thermal,
        total_energy=kinetic + grad_energy + potential + thermal,
        entropy=float(gr.integrate(entropy_density(state.phi, theta, p), g)),
        entropy_production=float(gr.integrate(entropy_production_density(state, g, p), g)),
        theta_min=float(theta.min()),
        theta_max=float(theta.max()),
        umax=float(np.sqrt(_sq(state.u)).max()),
        div_norm=gr.l2_norm(gr.divergence(state.u, g), g),
    )


def _riemann_weights(traj):
    t = traj.times
    if len(t) == 1:
        return np.array([traj.nominal_dt])
    w = np.zeros(len(t))
    w[:-1] = np.diff(t)
    return w


def apriori_monitor(traj, p=None):
    """Evaluate the sixteen space-time norms bounded by the energy/entropy estimates."""
    if not traj.snapshots:
        raise ValueError("empty trajectory")
    g = traj.grid
    p = traj.params if p is None else p
    w = _riemann_weights(traj)
    sup = {k: 0.0 for k in ("Q", "u", "F", "phi", "theta")}
    acc = {k: 0.0 for k in ("sDu", "smu", "kth", "gth", "glog", "gbeta", "lbeta", "Du", "gmu", "muH1", "lp")}
    for wk, s in zip(w, traj.snapshots):
        theta = require_positive(s.theta)
        F, _, _ = double_well(s.phi)
        sup["Q"] = max(sup["Q"], float(gr.integrate(np.abs(thermal_energy(theta, p)), g)))
        sup["u"] = max(sup["u"], gr.l2_norm(s.u, g))
        sup["F"] = max(sup["F"], float(gr.integrate(F, g)))
        sup["phi"] = max(sup["phi"], float(np.sqrt(gr.integrate(s.phi**2 + _sq(gr.gradient(s.phi, g)), g))))
        sup["theta"] = max(sup["theta"], float(gr.integrate(theta ** (p.delta + 1), g)) ** (1 / (p.delta + 1)))
        if wk == 0:
            continue
        du2 = _sq(gr.sym_gradient(s.u, g))
        dmu2 = _sq(gr.gradient(s.mu, g))
        dth2 = _sq(gr.gradient(theta, g))
        acc["sDu"] += wk * gr.integrate(du2 / theta, g)
        acc["smu"] += wk * gr.integrate(dmu2 / theta, g)
        acc["kth"] += wk * gr.integrate(conductivity(theta, p) * dth2 / theta**2, g)
        acc["gth"] += wk * gr.integrate(dth2, g)
        acc["glog"] += wk * gr.integrate(_sq(gr.gradient(np.log(theta), g)), g)
        acc["gbeta"] += wk * gr.integrate(_sq(gr.gradient(theta ** (p.beta / 2), g)), g)
        l3b = gr.integrate(theta ** (3 * p.beta), g) ** (1 / (3 * p.beta))
        acc["lbeta"] += wk * l3b**p.beta
        acc["Du"] += wk * gr.integrate(du2, g)
        acc["gmu"] += wk * gr.integrate(dmu2, g)
        acc["muH1"] += wk * gr.integrate(s.mu**2 + dmu2, g)
        acc["lp"] += wk * gr.integrate(theta**p.p_beta_delta, g)

    root = lambda x: float(np.sqrt(x))
    report = BoundReport(
        Q_Linf_L1=sup["Q"],
        u_Linf_L2=sup["u"],
        F_Linf_L1=sup["F"],
        phi_Linf_H1=sup["phi"],
        theta_Linf_Ldelta1=sup["theta"],
        invsqrt_theta_Du_L2=root(acc["sDu"]),
        invsqrt_theta_gradmu_L2=root(acc["smu"]),
        kappa_over_theta2_gradtheta2_L1=float(acc["kth"]),
        gradtheta_L2=root(acc["gth"]),
        gradlogtheta_L2=root(acc["glog"]),
        gradthetabeta2_L2=root(acc["gbeta"]),
        theta_Lbeta_L3beta=float(acc["lbeta"]) ** (1 / p.beta),
        Du_L2=root(acc["Du"]),
        gradmu_L2=root(acc["gmu"]),
        mu_L2H1=root(acc["muH1"]),
        theta_Lp=float(acc["lp"]) ** (1 / p.p_beta_delta),
    )
    if not report.all_finite():
        raise FloatingPointError(f"non-finite a-priori monitor: {report}")
    return report


class TestFunction:
    """Separable test function ``xi(t, x) = T(t) * X(x)``.

    ``T`` is the C-infinity step ``f(1 - s) / (f(1 - s) + f(s))`` with
    ``s = t / t_final`` and ``f(r) = exp(-1/r)`` (0 for r <= 0): it falls from
    1 to 0 and every derivative vanishes at both ends, so the trapezoid rule
    integrates ``T'`` without the usual O(h^2) end corrections. ``X`` is a real
    trigonometric polynomial (squared when ``square=True``, which makes xi
    nonnegative).
    """

    __test__ = False  # not a pytest class

    def __init__(self, t_final, modes=(), const=0.0, square=False):
        self.t_final = float(t_final)
        self.modes = [tuple(m) for m in modes]  # (mx, my, a_cos, b_sin)
        self.const = float(const)
        self.square = bool(square)

    @classmethod
    def random(cls, t_final, seed, nonnegative=False, max_mode=2):
        rng = np.random.default_rng(seed)
        modes = []
        for mx in range(0, max_mode + 1):
            for my in range(-max_mode, max_mode + 1):
                if mx == 0 and my <= 0:
                    continue
                a, b = rng.normal(scale=0.5, size=2)
                modes.append((mx, my, a, b))
        return cls(t_final, modes, const=1.0 if nonnegative else rng.normal(), square=nonnegative)

    @classmethod
    def zero(cls, t_final):
        return cls(t_final)

    @staticmethod
    def _flat(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            return np.where(r > 0, np.exp(-1.0 / np.where(r > 0, r, 1.0)), 0.0)

    def time(self, t):
        s = np.asarray(t, dtype=float) / self.t_final
        a, b = self._flat(1 - s), self._flat(s)
        return a / (a + b)

    def time_derivative(self, t):
        s = np.asarray(t, dtype=float) / self.t_final
        a, b = self._flat(1 - s), self._flat(s)
        inside = (s > 0) & (s < 1)
        ss = np.where(inside, s, 0.5)
        with np.errstate(under="ignore"):
            val = -a * b * (1 / (1 - ss) ** 2 + 1 / ss**2) / (a + b) ** 2
        return np.where(inside, val, 0.0) / self.t_final

    def _poly(self, g):
        x, y = g.coords()
        kx, ky = 2 * np.pi / g.lx, 2 * np.pi / g.ly
        val = np.full(g.shape, self.const)
        grad = np.zeros((2,) + g.shape)
        hess = np.zeros((2, 2) + g.shape)
        for mx, my, a, b in self.modes:
            k = np.array([kx * mx, ky * my])
            arg = k[0] * x + k[1] * y
            c, s = np.cos(arg), np.sin(arg)
            val += a * c + b * s
            d1 = -a * s + b * c
            d2 = -(a * c + b * s)
            for i in range(2):
                grad[i] += k[i] * d1
                for j in range(2):
                    hess[i, j] += k[i] * k[j] * d2
        return val, grad, hess

    def spatial(self, g):
        """Return ``(X, grad X, hess X)`` on the grid, all analytic."""
        val, grad, hess = self._poly(g)
        if self.square:
            hess = 2 * (np.einsum("i...,j...->ij...", grad, grad) + val * hess)
            grad = 2 * val * grad
            val = val**2
        return val, grad, hess

    def sup_norm(self, g):
        return float(np.max(np.abs(self.spatial(g)[0])))


def _check_final(traj, xi):
    if abs(float(xi.time(traj.times[-1]))) > 1e-14:
        raise ValueError("test function does not vanish at the final time of the trajectory")


def _trapezoid(values, t):
    values = np.asarray(values)
    if len(t) < 2:
        return 0.0
    return float(np.sum(0.5 * (values[1:] + values[:-1]) * np.diff(t)))


def weak_energy_residual(traj, xi, g=None, p=None):
    """Left-hand side of the weak total energy balance for a discrete trajectory.

    Includes the regrouped capillary flux terms; the initial-data term is
    ``+ int (|u0|^2/2 + e0) xi(0)`` so that the expression vanishes for exact
    solutions.
    """
    g = traj.grid if g is None else g
    p = traj.params if p is None else p
    _check_final(traj, xi)
    X, dX, hX = xi.spatial(g)
    lapX = hX[0, 0] + hX[1, 1]
    eps = p.epsilon
    t = traj.times
    vals = []
    e_init = None
    for s in traj.snapshots:
        T, dT = float(xi.time(s.t)), float(xi.time_derivative(s.t))
        dphi = gr.gradient(s.phi, g)
        F, _, _ = double_well(s.phi)
        E = 0.5 * _sq(s.u) + F / eps + 0.5 * eps * _sq(dphi) + thermal_energy(s.theta, p)
        if e_init is None:
            e_init = float(gr.integrate(E * X, g)) * T
        if T == 0.0 and dT == 0.0:
            vals.append(0.0)
            continue
        dmu = gr.gradient(s.mu, g)
        hphi = gr.hessian(s.phi, g)
        stress = viscous_stress_field(s, g, p)
        su = np.einsum("ij...,j...->i...", stress, s.u)
        u_dX = np.einsum("i...,i...->...", s.u, dX)
        dens = (
            E * dT * X
            + T * E * u_dX
            + T * kirchhoff(s.theta, p) * lapX
            + T * s.p * u_dX
            - T * np.einsum("i...,i...->...", su, dX)
            + T * 0.5 * s.mu**2 * lapX
            + T * eps * np.einsum("i...,i...->...", s.u, dphi) * np.einsum("i...,i...->...", dphi, dX)
            + T * eps * np.einsum("i...,j...,ij...->...", dmu, dX, hphi)
            + T * eps * np.einsum("i...,j...,ij...->...", dmu, dphi, hX)
        )
        vals.append(float(gr.integrate(dens, g)))
    return _trapezoid(vals, t) + e_init


def viscous_stress_field(state, g, p):
    return viscosity(require_positive(state.theta), p) * gr.sym_gradient(state.u, g)


def weak_entropy_check(traj, xi, g=None, p=None, contraction="sym"):
    """(left side) - (right side) of the weak entropy production inequality.

    Satisfied when the returned value is <= ``entropy_tolerance(traj, xi)``.
    """
    g = traj.grid if g is None else g
    p = traj.params if p is None else p
    _check_final(traj, xi)
    X, dX, hX = xi.spatial(g)
    if np.min(X) < 0:
        raise ValueError("entropy check needs a nonnegative test function")
    lapX = hX[0, 0] + hX[1, 1]
    t = traj.times
    lhs, prod = [], []
    s_init = None
    for s in traj.snapshots:
        T, dT = float(xi.time(s.t)), float(xi.time_derivative(s.t))
        ent = entropy_density(s.phi, s.theta, p)
        if s_init is None:
            s_init = float(gr.integrate(ent * X, g)) * T
        if T == 0.0 and dT == 0.0:
            lhs.append(0.0)
            prod.append(0.0)
            continue
        u_dX = np.einsum("i...,i...->...", s.u, dX)
        dens = ent * dT * X + T * ent * u_dX + T * entropy_flux_potential(s.theta, p) * lapX
        lhs.append(float(gr.integrate(dens, g)))
        prod.append(float(gr.integrate(entropy_production_density(s, g, p, contraction) * X, g)) * T)
    left = _trapezoid(lhs, t)
    right = -_trapezoid(prod, t) - s_init
    return left - right


def entropy_tolerance(traj, xi):
    dt = traj.nominal_dt if traj.nominal_dt > 0 else float(np.max(np.diff(traj.times)))
    return 10 * dt * xi.sup_norm(traj.grid) * traj.grid.area
