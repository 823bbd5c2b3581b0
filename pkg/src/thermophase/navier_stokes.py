"""Incompressible momentum step with temperature-dependent viscosity.

The viscous stress is ``S = nu(theta) Du`` with ``Du`` the symmetric
gradient, so for constant viscosity ``div S = (nu/2) lap u`` on
divergence-free fields. The step treats ``div(nu_bar Du)`` implicitly
(``nu_bar`` = spatial mean of nu(theta)) and everything else explicitly:

    w     = u0 + dt * ( -dealias((u0 . grad) u0) + capillary(phi)
                        + div(dealias((nu - nu_bar) Du0)) )
    w     = P w + grad(psi)                  (Leray split, p = psi / dt)
    u1    = (1 - dt nu_bar/2 lap)^{-1} P w
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid as gr
from .constitutive import require_positive, viscosity


@dataclass
class NsStepReport:
    u_new: np.ndarray
    p_new: np.ndarray
    div_norm: float
    momentum_drift: np.ndarray


def capillary_force(phi, g, p):
    """``-eps div(grad phi (x) grad phi)`` with the tensor dealiased."""
    phi = gr.check_scalar(phi, g)
    dphi = gr.gradient(phi, g)
    tensor = np.einsum("i...,j...->ij...", dphi, dphi)
    tensor = gr.ifft(gr.fft(tensor) * g.mask)
    return -p.epsilon * gr.tensor_divergence(tensor, g)


def stress_from_rate(rate, theta, p):
    """Pointwise ``nu(theta) * rate`` for a symmetric rate tensor field."""
    theta = require_positive(theta)
    return viscosity(theta, p) * np.asarray(rate, dtype=float)


def viscous_stress(u, theta, g, p):
    u = gr.check_vector(u, g)
    theta = gr.check_scalar(theta, g)
    return stress_from_rate(gr.sym_gradient(u, g), theta, p)


def convection(u, g):
    """Dealiased ``(u . grad) u``."""
    grad_u = gr.velocity_gradient(u, g)
    conv = np.einsum("j...,ij...->i...", u, grad_u)
    return gr.ifft(gr.fft(conv) * g.mask)


def ns_step(u, phi, theta, dt, g, p, source=None):
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    u = gr.check_vector(u, g)
    phi = gr.check_scalar(phi, g)
    theta = gr.check_scalar(theta, g)
    for f in (u, phi, theta, source):
        if f is not None and not np.all(np.isfinite(f)):
            raise ValueError("input field contains NaN or inf")
    theta = require_positive(theta)

    nu = viscosity(theta, p)
    nu_bar = float(np.mean(nu))
    rate = gr.sym_gradient(u, g)
    fluct = gr.ifft(gr.fft((nu - nu_bar) * rate) * g.mask)

    rhs = -convection(u, g) + capillary_force(phi, g, p) + gr.tensor_divergence(fluct, g)
    if source is not None:
        rhs = rhs + gr.check_vector(source, g)

    w_h = gr.fft(u + dt * rhs)
    proj_h, psi_h = gr._project_spectral(w_h, g)
    u_new = gr.ifft(proj_h / (1 + 0.5 * dt * nu_bar * g.k2))
    p_new = gr.ifft(psi_h) / dt

    div_norm = gr.l2_norm(gr.divergence(u_new, g), g)
    drift = gr.integrate(u_new, g) - gr.integrate(u, g)
    return NsStepReport(u_new=u_new, p_new=p_new, div_norm=div_norm, momentum_drift=np.asarray(drift))


def kinetic_energy(u, g):
    return float(gr.integrate(0.5 * np.sum(u**2, axis=0), g))
