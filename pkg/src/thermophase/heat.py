"""Internal-energy step in the conservative variable ``q = Q(theta)``.

    q1 = q0 + dt * ( -dealias(u . grad q0) - theta0 * Dphi/Dt + sources )
            + dt * lap(khat(theta1))

with ``khat`` the Kirchhoff transform of the conductivity, so diffusion is
a Laplacian of a pointwise function and integrates to zero exactly. The
implicit part is solved by a Picard iteration with the conductivity frozen
at the current iterate and a constant-coefficient Fourier inversion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid as gr
from .constitutive import (
    conductivity,
    kirchhoff,
    require_positive,
    specific_heat,
    thermal_energy,
    thermal_energy_inverse,
    viscosity,
)
from .errors import ConvergenceError, DomainError, PositivityError

PICARD_TOL = 1e-10
PICARD_MAX_ITER = 200


@dataclass
class HeatStepReport:
    theta_new: np.ndarray
    theta_min: float
    theta_max: float
    picard_iters: int
    q_drift: float


def dissipation_sources(u, mu, theta, g, p):
    """Pointwise ``nu(theta) |Du|^2 + |grad mu|^2`` (no truncation, so >= 0)."""
    u = gr.check_vector(u, g)
    mu = gr.check_scalar(mu, g)
    theta = require_positive(gr.check_scalar(theta, g))
    rate = gr.sym_gradient(u, g)
    dmu = gr.gradient(mu, g)
    return viscosity(theta, p) * np.sum(rate**2, axis=(0, 1)) + np.sum(dmu**2, axis=0)


def material_derivative(phi_old, phi_new, u, dt, g):
    """``(phi_new - phi_old)/dt + dealias(u . grad phi_old)``, as used by the CH step."""
    dphi = gr.gradient(phi_old, g)
    adv = gr.dealias(u[0] * dphi[0] + u[1] * dphi[1], g)
    return (phi_new - phi_old) / dt + adv


def explicit_update(theta, u, phi_old, phi_new, mu, dt, g, p, u_phi=None, source=None):
    """Return ``(q_star, injected)``: the explicit part of the update and its net source."""
    q0 = thermal_energy(theta, p)
    dq = gr.gradient(q0, g)
    adv = gr.dealias(u[0] * dq[0] + u[1] * dq[1], g)
    dphidt = material_derivative(phi_old, phi_new, u if u_phi is None else u_phi, dt, g)
    injected = dissipation_sources(u, mu, theta, g, p) - theta * dphidt
    if source is not None:
        injected = injected + gr.check_scalar(source, g)
    return q0 + dt * (injected - adv), injected


def heat_step(theta, u, phi_old, phi_new, mu, dt, g, p, *, u_phi=None, source=None,
              tol=PICARD_TOL, max_iter=PICARD_MAX_ITER):
    """Advance theta by one step.

    ``u`` advects the thermal energy and enters the viscous heating;
    ``u_phi`` (default ``u``) is the velocity that transported phi in the
    preceding Cahn-Hilliard step, so that the latent term uses the same
    material derivative.

    Raises PositivityError if any temperature iterate or the final
    temperature is nonpositive, ConvergenceError if the iteration stalls.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    theta = gr.check_scalar(theta, g)
    u = gr.check_vector(u, g)
    phi_old = gr.check_scalar(phi_old, g)
    phi_new = gr.check_scalar(phi_new, g)
    mu = gr.check_scalar(mu, g)
    for f in (theta, u, phi_old, phi_new, mu, u_phi, source):
        if f is not None and not np.all(np.isfinite(f)):
            raise ValueError("input field contains NaN or inf")
    require_positive(theta)

    q_star, injected = explicit_update(theta, u, phi_old, phi_new, mu, dt, g, p, u_phi, source)
    if not np.all(np.isfinite(q_star)):
        raise PositivityError("explicit heat update is not finite", dt=dt)

    it_theta = theta.copy()
    for it in range(1, max_iter + 1):
        kappa = conductivity(it_theta, p)
        residual = thermal_energy(it_theta, p) - q_star - dt * gr.laplacian(kirchhoff(it_theta, p), g)
        a = float(np.max(specific_heat(it_theta, p) / kappa))
        dw = gr.ifft(-gr.fft(residual) / (a + dt * g.k2))
        nxt = it_theta + dw / kappa
        if not np.all(np.isfinite(nxt)) or np.min(nxt) <= 0:
            raise PositivityError(
                f"temperature iterate became nonpositive (min {np.min(nxt):.3g}) at dt={dt}",
                theta_min=float(np.min(nxt)), dt=dt)
        change = float(np.max(np.abs(nxt - it_theta)))
        it_theta = nxt
        if change <= tol:
            break
    else:
        raise ConvergenceError(f"Picard iteration did not converge in {max_iter} passes "
                               f"(last increment {change:.3g})", iterations=max_iter, increment=change)

    q_new = q_star + dt * gr.laplacian(kirchhoff(it_theta, p), g)
    if not np.all(np.isfinite(q_new)) or np.min(q_new) <= 0:
        raise PositivityError(f"thermal energy became nonpositive at dt={dt}",
                              theta_min=float(np.min(q_new)), dt=dt)
    try:
        theta_new = thermal_energy_inverse(q_new, p)
    except DomainError as exc:  # pragma: no cover - guarded above
        raise PositivityError(str(exc), dt=dt) from exc

    drift = float(gr.integrate(thermal_energy(theta_new, p), g) - gr.integrate(thermal_energy(theta, p), g)
                  - dt * gr.integrate(injected, g))
    return HeatStepReport(theta_new=theta_new, theta_min=float(theta_new.min()),
                          theta_max=float(theta_new.max()), picard_iters=it, q_drift=drift)
