import numpy as np
import pytest

from thermophase import grid as gr
from thermophase.constitutive import thermal_energy
from thermophase.errors import ConvergenceError, DomainError, PositivityError
from thermophase.grid import Grid
from thermophase.heat import PICARD_MAX_ITER, dissipation_sources, explicit_update, heat_step

from conftest import smooth_field
from dense import DenseOps, heat_explicit_oracle, heat_step_oracle


def test_sources_vanish_at_rest(params):
    g = Grid(8, 8)
    s = dissipation_sources(np.zeros((2, 8, 8)), np.full(g.shape, 2.0), np.ones(g.shape), g, params)
    assert np.max(np.abs(s)) < 1e-14


def test_sources_single_mode(params):
    g = Grid(16, 8, 3.0, 1.0)
    x, _ = g.coords()
    k = 2 * np.pi / g.lx
    s = dissipation_sources(np.zeros((2,) + g.shape), np.sin(k * x), np.ones(g.shape), g, params)
    assert np.max(np.abs(s - k**2 * np.cos(k * x) ** 2)) < 1e-12


def test_sources_dense_oracle_and_sign(params, rng):
    g = Grid(8, 8)
    ops = DenseOps(8, 8)
    u, mu = rng.normal(size=(2, 8, 8)), rng.normal(size=g.shape)
    theta = 0.5 + rng.uniform(size=g.shape)
    s = dissipation_sources(u, mu, theta, g, params)
    Du = ops.sym_grad([ops.flat(u[0]), ops.flat(u[1])])
    gm = ops.grad(mu)
    nu = params.nu0 + params.nu1 / (1 + ops.flat(theta))
    expect = nu * sum(Du[i][j] ** 2 for i in range(2) for j in range(2)) + gm[0] ** 2 + gm[1] ** 2
    assert np.max(np.abs(s - ops.field(expect))) <= 1e-12 * np.max(expect)
    assert np.min(s) >= 0
    with pytest.raises(DomainError):
        dissipation_sources(u, mu, -theta, g, params)


def test_uniform_equilibrium(params):
    g = Grid(8, 8)
    theta = np.full(g.shape, 1.7)
    phi = np.full(g.shape, 0.2)
    rep = heat_step(theta, np.zeros((2, 8, 8)), phi, phi, np.zeros(g.shape), 1e-2, g, params)
    assert np.max(np.abs(rep.theta_new - theta)) < 1e-14


def test_pure_diffusion_conserves_thermal_energy(params, rng):
    g = Grid(32, 32)
    theta = 1 + 0.5 * smooth_field(g, rng, 3, scale=0.1)
    assert theta.min() > 0
    phi = smooth_field(g, rng)
    mu = smooth_field(g, rng)
    u = np.zeros((2,) + g.shape)
    dt = 1e-2
    rep = heat_step(theta, u, phi, phi, mu, dt, g, params)
    q0, q1 = gr.integrate(thermal_energy(theta, params), g), gr.integrate(thermal_energy(rep.theta_new, params), g)
    src = gr.integrate(dissipation_sources(u, mu, theta, g, params), g)
    assert abs((q1 - q0) - dt * src) <= 1e-11 * abs(q1)
    assert abs(rep.q_drift) <= 1e-11 * abs(q1)


def test_q_drift_is_roundoff_with_flow(params, rng):
    g = Grid(32, 32)
    theta = 1 + 0.5 * smooth_field(g, rng, 3, scale=0.1)
    u = gr.leray_project(rng.normal(size=(2,) + g.shape), g)
    phi0, phi1, mu = (smooth_field(g, rng) for _ in range(3))
    rep = heat_step(theta, u, phi0, 0.99 * phi0 + 0.01 * phi1, mu, 1e-3, g, params)
    assert abs(rep.q_drift) <= 1e-11 * gr.integrate(thermal_energy(theta, params), g)


def test_dense_oracle_4x4(params):
    g = Grid(4, 4)
    ops = DenseOps(4, 4)
    x, y = g.coords()
    theta = 1 + 0.1 * np.sin(2 * np.pi * x / g.lx)
    u = np.zeros((2, 4, 4))
    phi = np.zeros(g.shape)
    rep = heat_step(theta, u, phi, phi, np.zeros(g.shape), 1e-2, g, params)
    assert np.max(np.abs(rep.theta_new - heat_step_oracle(ops, theta, u, phi, phi, np.zeros(g.shape), 1e-2))) < 1e-10


def test_dense_oracle_4x4_full_coupling(params, rng):
    g = Grid(4, 4)
    ops = DenseOps(4, 4)
    theta = 1 + 0.2 * rng.uniform(size=g.shape)
    u = 0.5 * rng.normal(size=(2, 4, 4))
    phi0, mu = 0.3 * rng.normal(size=g.shape), 0.3 * rng.normal(size=g.shape)
    phi1 = phi0 + 1e-3 * rng.normal(size=g.shape)
    dt = 5e-3
    q_star, _ = explicit_update(theta, u, phi0, phi1, mu, dt, g, params)
    assert np.max(np.abs(q_star - ops.field(heat_explicit_oracle(ops, theta, u, phi0, phi1, mu, dt)))) < 1e-12
    rep = heat_step(theta, u, phi0, phi1, mu, dt, g, params)
    assert np.max(np.abs(rep.theta_new - heat_step_oracle(ops, theta, u, phi0, phi1, mu, dt))) < 1e-10


@pytest.mark.parametrize("dt, shift", [(10.0, 1.0), (1e-3, 0.0)])
def test_positivity_failure_is_structured(params, dt, shift):
    """A latent sink larger than the available thermal energy: error, never a clamp.

    At dt = 10 implicit diffusion spreads any local deficit, so the sink must
    have a negative mean; at a small step a local deficit already fails.
    """
    g = Grid(16, 16)
    x, _ = g.coords()
    theta = np.ones(g.shape)
    phi0 = np.zeros(g.shape)
    phi1 = shift + 2 * np.sin(x)
    with pytest.raises(PositivityError) as info:
        heat_step(theta, np.zeros((2,) + g.shape), phi0, phi1, np.zeros(g.shape), dt, g, params)
    assert info.value.dt == dt
    assert info.value.theta_min is not None and info.value.theta_min <= 0


def test_convergence_error_at_cap(params, rng):
    g = Grid(16, 16)
    theta = 1 + 0.3 * np.sin(g.coords()[0])
    phi = np.zeros(g.shape)
    with pytest.raises(ConvergenceError) as info:
        heat_step(theta, np.zeros((2,) + g.shape), phi, phi, phi, 1.0, g, params, max_iter=1)
    assert info.value.iterations == 1
    rep = heat_step(theta, np.zeros((2,) + g.shape), phi, phi, phi, 1.0, g, params)
    assert rep.picard_iters <= PICARD_MAX_ITER and rep.theta_min > 0


def test_invalid_inputs(params):
    g = Grid(8, 8)
    z = np.zeros(g.shape)
    with pytest.raises(ValueError):
        heat_step(z + 1, np.zeros((2, 8, 8)), z, z, z, 0.0, g, params)
    with pytest.raises(DomainError):
        heat_step(z, np.zeros((2, 8, 8)), z, z, z, 1e-3, g, params)
    bad = z.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        heat_step(z + 1, np.zeros((2, 8, 8)), bad, z, z, 1e-3, g, params)
