import numpy as np
import pytest

from thermophase import grid as gr
from thermophase.cahn_hilliard import ch_step, chemical_potential, isothermal_energy
from thermophase.constitutive import Params
from thermophase.errors import DomainError, GridMismatchError
from thermophase.grid import Grid

from conftest import smooth_field
from dense import DenseOps, ch_step_oracle


def test_chemical_potential_uniform(params):
    g = Grid(8, 8)
    for c in (1.0, 0.0):
        mu = chemical_potential(np.full(g.shape, c), np.full(g.shape, 1.3), g, params)
        assert np.max(np.abs(mu + 1.3)) < 1e-14


def test_chemical_potential_dense_oracle(params):
    g = Grid(4, 4)
    ops = DenseOps(4, 4)
    x, _ = g.coords()
    phi = 0.1 * np.sin(2 * np.pi * x / g.lx)
    theta = np.ones(g.shape)
    f = ops.flat(phi)
    expect = -params.epsilon * ops.L @ f + ops.M @ (f**3 - f) / params.epsilon - 1.0
    assert np.max(np.abs(chemical_potential(phi, theta, g, params) - ops.field(expect))) < 1e-12


def test_chemical_potential_errors(params):
    g = Grid(8, 8)
    with pytest.raises(GridMismatchError):
        chemical_potential(np.zeros((4, 4)), np.ones(g.shape), g, params)
    with pytest.raises(DomainError):
        chemical_potential(np.zeros(g.shape), np.zeros(g.shape), g, params)


def test_uniform_fixed_point(params):
    g = Grid(8, 8)
    phi = np.full(g.shape, 0.3)
    rep = ch_step(phi, np.zeros((2, 8, 8)), np.full(g.shape, 2.0), 1e-2, g, params)
    assert np.max(np.abs(rep.phi_new - phi)) < 1e-15
    assert rep.mass_drift == 0


def test_mass_exact_for_arbitrary_input(params, rng):
    g = Grid(16, 16)
    phi = rng.normal(size=g.shape)
    u = rng.normal(size=(2,) + g.shape)  # not even divergence-free
    theta = 1 + rng.uniform(size=g.shape)
    for _ in range(20):
        rep = ch_step(phi, u, theta, 1e-2, g, params)
        assert rep.mass_drift <= 1e-13 * (1 + abs(phi.mean()))
        phi = rep.phi_new


def test_dense_oracle_4x4(params, rng):
    g = Grid(4, 4)
    ops = DenseOps(4, 4)
    phi = 0.1 * rng.normal(size=g.shape)
    theta = np.ones(g.shape)
    rep = ch_step(phi, np.zeros((2, 4, 4)), theta, 1e-3, g, params)
    assert np.max(np.abs(rep.phi_new - ch_step_oracle(ops, phi, np.zeros((2, 4, 4)), theta, 1e-3))) < 1e-11


def test_dense_oracle_4x4_with_flow_and_heat(params, rng):
    g = Grid(4, 4)
    ops = DenseOps(4, 4)
    phi = 0.3 * rng.normal(size=g.shape)
    u = rng.normal(size=(2, 4, 4))
    theta = 1 + 0.5 * rng.uniform(size=g.shape)
    rep = ch_step(phi, u, theta, 5e-3, g, params)
    assert np.max(np.abs(rep.phi_new - ch_step_oracle(ops, phi, u, theta, 5e-3))) < 1e-11


def test_invalid_inputs(params):
    g = Grid(8, 8)
    z = np.zeros(g.shape)
    with pytest.raises(ValueError):
        ch_step(z, np.zeros((2, 8, 8)), z + 1, 0.0, g, params)
    bad = z.copy()
    bad[1, 1] = np.nan
    with pytest.raises(ValueError):
        ch_step(bad, np.zeros((2, 8, 8)), z + 1, 1e-3, g, params)


def test_isothermal_lyapunov_decay(params):
    """500 steps of a spinodal-type relaxation with u = 0, theta const."""
    g = Grid(64, 64)
    p = Params(epsilon=0.2)  # genuinely unstable band on the 2pi box
    phi = 0.1 * gr.band_limited_noise(g, np.random.default_rng(42), 8)
    theta = np.ones(g.shape)
    u = np.zeros((2,) + g.shape)
    E = [isothermal_energy(phi, theta, g, p)]
    for _ in range(500):
        phi = ch_step(phi, u, theta, 1e-3, g, p).phi_new
        E.append(isothermal_energy(phi, theta, g, p))
    assert np.max(np.abs(phi)) <= 1.2  # S = 2 >= sup |F''| over the reached range
    assert np.all(np.diff(E) <= 1e-12 * abs(E[0]))
    assert E[-1] < E[0]


def test_first_order_in_time(params):
    g = Grid(32, 32)
    x, y = g.coords()
    phi0 = 0.5 * np.sin(x) * np.cos(y) + 0.2 * np.cos(2 * y)
    u = 0.5 * np.stack([np.cos(y), np.sin(x)])
    theta = 1 + 0.1 * np.cos(x - y)
    T = 0.1

    def solve(dt):
        phi = phi0.copy()
        for _ in range(int(round(T / dt))):
            phi = ch_step(phi, u, theta, dt, g, params).phi_new
        return phi

    ref = solve(0.01 / 16)
    e1 = gr.l2_norm(solve(0.01) - ref, g)
    e2 = gr.l2_norm(solve(0.005) - ref, g)
    # against a dt/16 reference the halving ratio is (1 - 1/16)/(1/2 - 1/16) ~ 2.14
    assert 1.7 <= e1 / e2 <= 2.3
