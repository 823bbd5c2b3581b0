"""Operator splitting, initial conditions and the run driver.

One step is a Lie splitting in the fixed order Cahn-Hilliard -> Navier-Stokes
-> heat: phi moves first so the heat step sees the fresh increment of phi
(latent coupling) together with the new velocity and chemical potential
(dissipative heating).
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os

import numpy as np

from . import grid as gr
from .audit import apriori_monitor, diagnostics
from .cahn_hilliard import ch_step, chemical_potential
from .errors import CFLError, PositivityError
from .heat import heat_step
from .io import (
    config_to_text,
    resolve_out_dir,
    write_diagnostics,
    write_snapshot,
)
from .navier_stokes import ns_step
from .state import State, Trajectory

log = logging.getLogger(__name__)

NOISE_MODES = 2  # spinodal noise is limited to wave indices |m| <= 2
MAX_RETRIES = 5


def taylor_green(g, amplitude=1.0):
    """Divergence-free single-mode vortex array filling the box."""
    x, y = g.coords()
    kx, ky = 2 * np.pi / g.lx, 2 * np.pi / g.ly
    return amplitude * np.stack([np.sin(kx * x) * np.cos(ky * y),
                                 -(kx / ky) * np.cos(kx * x) * np.sin(ky * y)])


def _spinodal_phi(ini, g):
    rng = np.random.default_rng(ini.seed)
    if ini.amplitude == 0:
        return np.full(g.shape, float(ini.m0))
    return ini.m0 + ini.amplitude * gr.band_limited_noise(g, rng, NOISE_MODES)


def init_state(cfg, g, p):
    ini = cfg.initial
    if not ini.theta0 > 0:
        raise ValueError("initial temperature must be strictly positive")
    theta = np.full(g.shape, float(ini.theta0))
    u = np.zeros((2,) + g.shape)
    x, y = g.coords()

    if ini.scenario == "spinodal":
        phi = _spinodal_phi(ini, g)
    elif ini.scenario == "spinodal_shear":
        phi = _spinodal_phi(ini, g)
        u = taylor_green(g)
    elif ini.scenario == "bubble":
        if ini.radius == 0:
            phi = np.full(g.shape, -1.0)
        else:
            d = np.hypot(x - g.lx / 2, y - g.ly / 2)
            phi = gr.dealias(np.tanh((ini.radius - d) / np.sqrt(p.epsilon)), g)
    elif ini.scenario == "shear":
        phi = ini.m0 + ini.amplitude * np.sin(2 * np.pi * y / g.ly)
        u = taylor_green(g)
    elif ini.scenario == "manufactured":
        from .mms import coupled_initial_fields
        u, phi, theta = coupled_initial_fields(g, ini.amplitude, ini.theta0)
    else:
        raise ValueError(f"unknown scenario {ini.scenario!r}")

    mu = chemical_potential(phi, theta, g, p)
    return State(t=0.0, u=u, phi=phi, mu=mu, theta=theta, p=np.zeros(g.shape))


def max_stable_dt(state, g, cfl):
    umax = float(np.sqrt(np.sum(state.u**2, axis=0)).max())
    return cfl * min(g.dx, g.dy) / max(1.0, umax)


def _lie_step(state, dt, g, p):
    ch = ch_step(state.phi, state.u, state.theta, dt, g, p)
    ns = ns_step(state.u, ch.phi_new, state.theta, dt, g, p)
    ht = heat_step(state.theta, ns.u_new, state.phi, ch.phi_new, ch.mu_new, dt, g, p, u_phi=state.u)
    mu = chemical_potential(ch.phi_new, ht.theta_new, g, p)
    return State(t=state.t + dt, u=ns.u_new, phi=ch.phi_new, mu=mu, theta=ht.theta_new, p=ns.p_new)


def step(state, dt, g, p, cfl=0.25, retries=MAX_RETRIES):
    """One split step of size dt.

    A positivity failure in the heat step triggers a retry as two half
    steps, recursively, at most ``retries`` levels deep.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    limit = max_stable_dt(state, g, cfl)
    if dt > limit * (1 + 1e-12):
        raise CFLError(f"dt={dt:.3g} exceeds the CFL limit {limit:.3g}")
    try:
        return _lie_step(state, dt, g, p)
    except PositivityError as exc:
        if retries <= 0:
            raise PositivityError(f"temperature positivity lost after {MAX_RETRIES} step halvings: {exc}",
                                  theta_min=exc.theta_min, dt=exc.dt) from exc
        log.info("positivity failure at t=%.6g, dt=%.3g; retrying with two half steps", state.t, dt)
        half = step(state, dt / 2, g, p, cfl, retries - 1)
        return step(half, dt / 2, g, p, cfl, retries - 1)


def config_fingerprint(cfg):
    return hashlib.sha256(config_to_text(cfg).encode()).hexdigest()


def run(cfg, write=False, out_dir=None, progress=None):
    """Simulate ``cfg`` up to ``t_final``; optionally write artifacts to disk.

    Diagnostics are recorded every step, snapshots every ``snap_every``
    steps and at the final step.
    """
    g, p = cfg.make_grid(), cfg.make_params()
    dt = cfg.time.dt
    every = cfg.output.snap_every
    state = init_state(cfg, g, p)
    traj = Trajectory(grid=g, params=p, fingerprint=config_fingerprint(cfg), nominal_dt=dt)
    traj.snapshots.append(state)
    traj.records.append(diagnostics(state, g, p, dt))

    n_steps = max(0, math.ceil(cfg.time.t_final / dt - 1e-9))
    for k in range(1, n_steps + 1):
        state = step(state, dt, g, p, cfg.time.cfl)
        state.t = k * dt
        traj.records.append(diagnostics(state, g, p, dt))
        if k % every == 0 or k == n_steps:
            traj.snapshots.append(state)
        if progress is not None:
            progress(k, n_steps, traj.records[-1])
    traj.bounds = apriori_monitor(traj, p)

    if write:
        write_run(cfg, traj, resolve_out_dir(cfg, out_dir))
    return traj


def write_run(cfg, traj, out_dir):
    os.makedirs(os.path.join(out_dir, "snapshots"), exist_ok=True)
    with open(os.path.join(out_dir, "config.ini"), "w") as fh:
        fh.write(config_to_text(cfg))
    for i, s in enumerate(traj.snapshots):
        write_snapshot(s, traj.grid, os.path.join(out_dir, "snapshots", f"snap_{i:06d}.thpf"))
    write_diagnostics(traj.records, os.path.join(out_dir, cfg.output.diag_file))
    with open(os.path.join(out_dir, "bounds.json"), "w") as fh:
        json.dump(traj.bounds.as_dict(), fh, indent=2)
