"""Manufactured-solution convergence checks for the three steppers.

Each equation is tested on its own: the fields that the equation does not
evolve are prescribed analytically, and a hand-derived forcing makes a
chosen trigonometric polynomial an exact solution. Grid and step are
refined together (n = 16 * 2**level, dt = DT0 / 2**level), so the error is
dominated by the first-order time discretisation and should halve per level.

All fields carry an ``amplitude`` factor; with ``amplitude=0`` the exact
solution is the trivial state and the error must be round-off.
"""
from __future__ import annotations

import math

import numpy as np

from . import grid as gr
from .cahn_hilliard import ch_step
from .constitutive import Params, conductivity, specific_heat, viscosity
from .heat import heat_step
from .navier_stokes import ns_step

EQUATIONS = ("ch", "ns", "heat")
DT0 = 0.01
T_FINAL = 0.2
BASE_N = 16
MAX_LEVEL = 4


# -- Cahn-Hilliard -------------------------------------------------------------
#   phi = A/2 cos(t) sin x cos y,  u = A/2 (cos y, sin x),  theta = 1 + A/10 cos(x - y)

def _ch_fields(g, t, A):
    x, y = g.coords()
    s = np.sin(x) * np.cos(y)
    c = 0.5 * A * np.cos(t)
    phi = c * s
    u = 0.5 * A * np.stack([np.cos(y), np.sin(x)])
    theta = 1 + 0.1 * A * np.cos(x - y)
    return phi, u, theta


def _ch_forcing(g, t, A, p):
    x, y = g.coords()
    s = np.sin(x) * np.cos(y)
    sx, sy = np.cos(x) * np.cos(y), -np.sin(x) * np.sin(y)
    c, dc = 0.5 * A * np.cos(t), -0.5 * A * np.sin(t)
    phi, u, _ = _ch_fields(g, t, A)
    eps = p.epsilon
    # lap s = -2 s, lap^2 s = 4 s
    lap_phi = -2 * phi
    lap_phi3 = c**3 * (-6 * s**3 + 6 * s * (sx**2 + sy**2))
    lap_theta = -0.2 * A * np.cos(x - y)
    lap_mu = -eps * 4 * phi + (lap_phi3 - lap_phi) / eps - lap_theta
    return dc * s + c * (u[0] * sx + u[1] * sy) - lap_mu


# -- Navier-Stokes -------------------------------------------------------------
#   u = A cos(t) (sin x cos y, -cos x sin y),  phi = A (sin x / 2 + 3 cos 2y / 10),
#   theta = 1 + 3A/10 sin(x + y)

def _ns_fields(g, t, A):
    x, y = g.coords()
    u = A * np.cos(t) * np.stack([np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y)])
    phi = A * (0.5 * np.sin(x) + 0.3 * np.cos(2 * y))
    theta = 1 + 0.3 * A * np.sin(x + y)
    return u, phi, theta


def _ns_forcing(g, t, A, p):
    x, y = g.coords()
    c, dc = A * np.cos(t), -A * np.sin(t)
    tg = np.stack([np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y)])
    _, phi, theta = _ns_fields(g, t, A)

    conv = c**2 * 0.5 * np.stack([np.sin(2 * x), np.sin(2 * y)])

    nu = viscosity(theta, p)
    dnu = -p.nu1 / (1 + theta) ** 2 * 0.3 * A * np.cos(x + y)  # d(nu)/dx = d(nu)/dy
    d11 = c * np.cos(x) * np.cos(y)  # Du = diag(d11, -d11)
    div_stress = nu * (-c * tg) + np.stack([d11 * dnu, -d11 * dnu])

    px, py = 0.5 * A * np.cos(x), -0.6 * A * np.sin(2 * y)
    pxx, pyy = -0.5 * A * np.sin(x), -1.2 * A * np.cos(2 * y)
    lap = pxx + pyy
    cap = -p.epsilon * np.stack([lap * px + pxx * px, lap * py + pyy * py])

    return dc * tg + conv - div_stress - cap


# -- heat ----------------------------------------------------------------------
#   theta = 1 + A/10 cos(t) sin x cos y,  u = A/2 (cos y, sin x),
#   phi = A/2 sin(x + t),  mu = 3A/10 cos y

def _heat_fields(g, t, A):
    x, y = g.coords()
    theta = 1 + 0.1 * A * np.cos(t) * np.sin(x) * np.cos(y)
    u = 0.5 * A * np.stack([np.cos(y), np.sin(x)])
    phi = 0.5 * A * np.sin(x + t)
    mu = 0.3 * A * np.cos(y)
    return theta, u, phi, mu


def _heat_forcing(g, t, A, p):
    x, y = g.coords()
    theta, u, _, _ = _heat_fields(g, t, A)
    a = 0.1 * A
    th_t = -a * np.sin(t) * np.sin(x) * np.cos(y)
    th_x = a * np.cos(t) * np.cos(x) * np.cos(y)
    th_y = -a * np.cos(t) * np.sin(x) * np.sin(y)
    lap_th = -2 * (theta - 1)

    cv, kap = specific_heat(theta, p), conductivity(theta, p)
    dkap = p.beta * theta ** (p.beta - 1)
    lap_khat = kap * lap_th + dkap * (th_x**2 + th_y**2)

    b = 0.5 * A
    du2 = 0.5 * b**2 * (np.cos(x) - np.sin(y)) ** 2  # |Du|^2
    dmu2 = (0.3 * A * np.sin(y)) ** 2
    dphidt = b * np.cos(x + t) + u[0] * b * np.cos(x + t)

    return (cv * (th_t + u[0] * th_x + u[1] * th_y) - lap_khat
            - viscosity(theta, p) * du2 - dmu2 + theta * dphidt)


# -- driver --------------------------------------------------------------------

def mms_grid(level):
    if not (isinstance(level, (int, np.integer)) and 0 <= level <= MAX_LEVEL):
        raise ValueError(f"level must be an integer in [0, {MAX_LEVEL}], got {level!r}")
    n = BASE_N * 2**level
    return gr.Grid(n, n)


def mms_error(equation, level, *, amplitude=1.0, dt=None, t_final=T_FINAL, params=None):
    """L2 error at ``t_final`` of the manufactured solution for one equation.

    ``dt`` defaults to ``DT0 / 2**level``; passing it explicitly gives a
    spatial-only refinement study.
    """
    if equation not in EQUATIONS:
        raise ValueError(f"unknown equation {equation!r}; expected one of {EQUATIONS}")
    g = mms_grid(level)
    p = Params() if params is None else params
    dt = DT0 / 2**level if dt is None else float(dt)
    n_steps = max(1, math.ceil(t_final / dt - 1e-9))
    A = float(amplitude)

    if equation == "ch":
        phi, _, _ = _ch_fields(g, 0.0, A)
        for k in range(n_steps):
            t0, t1 = k * dt, (k + 1) * dt
            _, u, theta = _ch_fields(g, t0, A)
            phi = ch_step(phi, u, theta, dt, g, p, source=_ch_forcing(g, t1, A, p)).phi_new
        exact = _ch_fields(g, n_steps * dt, A)[0]
        return gr.l2_norm(phi - exact, g)

    if equation == "ns":
        u, _, _ = _ns_fields(g, 0.0, A)
        for k in range(n_steps):
            t1 = (k + 1) * dt
            _, phi, theta = _ns_fields(g, t1, A)
            u = ns_step(u, phi, theta, dt, g, p, source=_ns_forcing(g, t1, A, p)).u_new
        exact = _ns_fields(g, n_steps * dt, A)[0]
        return gr.l2_norm(u - exact, g)

    theta = _heat_fields(g, 0.0, A)[0]
    for k in range(n_steps):
        t0, t1 = k * dt, (k + 1) * dt
        _, u, phi0, _ = _heat_fields(g, t0, A)
        _, _, phi1, mu = _heat_fields(g, t1, A)
        theta = heat_step(theta, u, phi0, phi1, mu, dt, g, p, u_phi=u,
                          source=_heat_forcing(g, t1, A, p)).theta_new
    exact = _heat_fields(g, n_steps * dt, A)[0]
    return gr.l2_norm(theta - exact, g)


def convergence_table(equation, levels, **kw):
    """Rows ``(level, n, dt, error, ratio)``; ratio is error[k-1]/error[k]."""
    rows, prev = [], None
    for level in range(levels + 1):
        err = mms_error(equation, level, **kw)
        dt = kw.get("dt") or DT0 / 2**level
        rows.append((level, BASE_N * 2**level, dt, err, prev / err if prev and err > 0 else float("nan")))
        prev = err
    return rows


def coupled_initial_fields(g, amplitude=1.0, theta0=1.0):
    """Smooth ``(u, phi, theta)`` at t = 0, for the 'manufactured' scenario."""
    A = float(amplitude)
    _, u, _ = _ch_fields(g, 0.0, A)
    phi, _, _ = _ch_fields(g, 0.0, A)
    theta = theta0 * (1 + 0.1 * A * np.sin(np.add(*g.coords())) / (1 + 0.1 * abs(A)))
    return u, phi, theta
