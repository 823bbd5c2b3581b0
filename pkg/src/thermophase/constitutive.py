"""Material laws: double-well potential, caloric and conductive laws, viscosity.

All functions are vectorised over numpy arrays. Temperature-dependent laws
refuse nonpositive temperatures instead of clamping them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Params:
    """Physical constants of the model.

    ``viscosity(theta) = nu0 + nu1 / (1 + theta)`` ranges monotonically between
    ``nu0 + nu1`` (at theta = 0) and ``nu0`` (theta -> inf).
    """

    epsilon: float = 1.0
    beta: float = 2.0
    delta: float = 0.75
    nu0: float = 0.05
    nu1: float = 0.1
    stab: float = 2.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.beta >= 2:
            raise ValueError(f"beta={self.beta} violates the conductivity bound beta >= 2")
        if not self.delta > 0.5:
            raise ValueError(f"delta={self.delta} violates the specific-heat bound delta > 1/2")
        if not self.delta < 1:
            raise ValueError(f"delta={self.delta} violates the specific-heat bound delta < 1")
        if not (self.nu0 > 0 and self.nu0 + self.nu1 > 0):
            raise ValueError("viscosity bounds must be positive: need nu0 > 0 and nu0 + nu1 > 0")
        if not self.stab >= 0:
            raise ValueError(f"stabilization constant must be >= 0, got {self.stab}")
        if not self.p_beta_delta > 3:  # implied by the two exponent bounds
            raise ValueError(f"p_beta_delta={self.p_beta_delta} must exceed 3")

    @property
    def p_beta_delta(self):
        return self.beta + 2.0 / 3.0 * (self.delta + 1.0)

    @property
    def nu_lo(self):
        return min(self.nu0, self.nu0 + self.nu1)

    @property
    def nu_hi(self):
        return max(self.nu0, self.nu0 + self.nu1)


def require_positive(theta, what="theta"):
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise DomainError(f"{what} contains non-finite values")
    if np.any(theta <= 0):
        raise DomainError(f"{what} must be strictly positive, min is {np.min(theta):.6g}")
    return theta


def double_well(phi):
    """Return ``(F, F', F'')`` for ``F = (phi^2 - 1)^2 / 4``."""
    phi = np.asarray(phi, dtype=float)
    sq = phi * phi
    return 0.25 * (sq - 1) * (sq - 1), (sq - 1) * phi, 3 * sq - 1


class HeatLaws(NamedTuple):
    cV: np.ndarray
    kappa: np.ndarray
    Q: np.ndarray
    Lam: np.ndarray
    khat: np.ndarray
    h: np.ndarray


def specific_heat(theta, p):
    return require_positive(theta) ** p.delta


def conductivity(theta, p):
    return 1.0 + require_positive(theta) ** p.beta


def thermal_energy(theta, p):
    """Antiderivative of the specific heat vanishing at 0."""
    return require_positive(theta) ** (p.delta + 1) / (p.delta + 1)


def thermal_energy_inverse(q, p):
    """Temperature with ``thermal_energy(theta) == q``; needs q > 0."""
    q = require_positive(q, "thermal energy")
    return ((p.delta + 1) * q) ** (1.0 / (p.delta + 1))


def entropy_lambda(theta, p):
    """Thermal entropy, the integral of cV(s)/s from 1 to theta."""
    return (require_positive(theta) ** p.delta - 1) / p.delta


def kirchhoff(theta, p):
    """Integral of the conductivity from 0 to theta."""
    theta = require_positive(theta)
    return theta + theta ** (p.beta + 1) / (p.beta + 1)


def entropy_flux_potential(theta, p):
    """Integral of kappa(s)/s from 1 to theta."""
    theta = require_positive(theta)
    return np.log(theta) + (theta**p.beta - 1) / p.beta


def heat_laws(theta, p):
    theta = require_positive(theta)
    return HeatLaws(
        cV=specific_heat(theta, p),
        kappa=conductivity(theta, p),
        Q=thermal_energy(theta, p),
        Lam=entropy_lambda(theta, p),
        khat=kirchhoff(theta, p),
        h=entropy_flux_potential(theta, p),
    )


def viscosity(theta, p):
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or not np.all(np.isfinite(theta)):
        raise DomainError("viscosity needs a finite, nonnegative temperature")
    return p.nu0 + p.nu1 / (1.0 + theta)


def internal_energy_density(phi, grad_phi, theta, p):
    """``F(phi)/eps + eps/2 |grad phi|^2 + Q(theta)``; grad_phi has a leading axis of 2."""
    F, _, _ = double_well(phi)
    grad_phi = np.asarray(grad_phi, dtype=float)
    return F / p.epsilon + 0.5 * p.epsilon * np.sum(grad_phi**2, axis=0) + thermal_energy(theta, p)


def entropy_density(phi, theta, p):
    return entropy_lambda(theta, p) + np.asarray(phi, dtype=float)
