"""Periodic 2D grid and Fourier pseudo-spectral differential operators.

Scalar fields are real arrays of shape ``(nx, ny)`` with ``x`` along axis 0
(``indexing="ij"``), vector fields have shape ``(2, nx, ny)`` and tensor
fields ``(2, 2, nx, ny)``.

Spectra are half-spectra from ``numpy.fft.rfft2`` (the last axis keeps
wave indices ``0..ny/2``), so every spectral array has shape
``(nx, ny//2 + 1)``. First-derivative symbols drop the Nyquist mode (its ``i k`` image is not
representable by a real field). The Laplacian symbol is built from the same
truncated wavenumbers, so ``divergence(gradient(f)) == laplacian(f)`` holds
mode by mode.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError


@dataclass(frozen=True, eq=False)
class Grid:
    nx: int
    ny: int
    lx: float = 2 * np.pi
    ly: float = 2 * np.pi

    # spectral metadata, filled in __post_init__
    kx: np.ndarray = field(init=False, repr=False)
    ky: np.ndarray = field(init=False, repr=False)
    k2: np.ndarray = field(init=False, repr=False)
    mask: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if int(n) != n or n < 4 or n % 2:
                raise ValueError(f"{name} must be an even integer >= 4, got {n}")
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError("domain lengths must be positive")

        mx = np.fft.fftfreq(self.nx, 1.0 / self.nx)
        my = np.fft.rfftfreq(self.ny, 1.0 / self.ny)
        kx = 2 * np.pi / self.lx * mx
        ky = 2 * np.pi / self.ly * my
        kx[self.nx // 2] = 0.0
        ky[-1] = 0.0
        kx = kx[:, None]
        ky = ky[None, :]
        mask = (np.abs(mx)[:, None] < self.nx / 3) & (np.abs(my)[None, :] < self.ny / 3)

        object.__setattr__(self, "kx", kx)
        object.__setattr__(self, "ky", ky)
        object.__setattr__(self, "k2", kx**2 + ky**2)
        object.__setattr__(self, "mask", mask)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def dx(self):
        return self.lx / self.nx

    @property
    def dy(self):
        return self.ly / self.ny

    @property
    def area(self):
        return self.lx * self.ly

    def coords(self):
        """Meshgrid of cell coordinates, each of shape ``(nx, ny)``."""
        x = np.arange(self.nx) * self.dx
        y = np.arange(self.ny) * self.dy
        return np.meshgrid(x, y, indexing="ij")

    def zeros(self):
        return np.zeros(self.shape)

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (self.nx, self.ny, self.lx, self.ly) == (other.nx, other.ny, other.lx, other.ly)

    def __hash__(self):
        return hash((self.nx, self.ny, self.lx, self.ly))


def check_scalar(f, g):
    f = np.asarray(f, dtype=float)
    if f.shape != g.shape:
        raise GridMismatchError(f"scalar field has shape {f.shape}, grid is {g.shape}")
    return f


def check_vector(v, g):
    v = np.asarray(v, dtype=float)
    if v.shape != (2,) + g.shape:
        raise GridMismatchError(f"vector field has shape {v.shape}, grid expects {(2,) + g.shape}")
    return v


def fft(f):
    """Half spectrum of a real field (or stack of fields) over the last two axes."""
    return np.fft.rfft2(f, axes=(-2, -1))


def ifft(fh):
    """Inverse of :func:`fft`; the grid's ny is even, so it is recovered from the shape."""
    fh = np.asarray(fh)
    return np.fft.irfft2(fh, s=(fh.shape[-2], 2 * (fh.shape[-1] - 1)), axes=(-2, -1))


def integrate(f, g):
    """Rectangle-rule integral over the periodic box (sums the last two axes)."""
    return g.dx * g.dy * np.sum(f, axis=(-2, -1))


def mean(f, g):
    return integrate(f, g) / g.area


def l2_norm(f, g):
    """L2 norm; vector and tensor components are summed pointwise."""
    f = np.asarray(f)
    sq = f**2
    while sq.ndim > 2:
        sq = sq.sum(axis=0)
    return float(np.sqrt(integrate(sq, g)))


def dealias(f, g):
    """2/3-rule truncation of a product computed in physical space."""
    return ifft(fft(f) * g.mask)


def gradient(f, g):
    f = check_scalar(f, g)
    fh = fft(f)
    return ifft(np.stack([1j * g.kx * fh, 1j * g.ky * fh]))


def divergence(v, g):
    v = check_vector(v, g)
    vh = fft(v)
    return ifft(1j * g.kx * vh[0] + 1j * g.ky * vh[1])


def laplacian(f, g):
    f = check_scalar(f, g)
    return ifft(-g.k2 * fft(f))


def biharmonic(f, g):
    f = check_scalar(f, g)
    return ifft(g.k2**2 * fft(f))


def hessian(f, g):
    """Second derivatives ``H[i, j] = d_i d_j f``."""
    f = check_scalar(f, g)
    fh = fft(f)
    xx, xy, yy = ifft(np.stack([-g.kx * g.kx * fh, -g.kx * g.ky * fh, -g.ky * g.ky * fh]))
    return np.stack([np.stack([xx, xy]), np.stack([xy, yy])])


def velocity_gradient(v, g):
    """``G[i, j] = d_j v_i``."""
    v = check_vector(v, g)
    vh = fft(v)
    ik = 1j * np.stack(np.broadcast_arrays(g.kx, g.ky))
    return ifft(vh[:, None] * ik[None])


def symmetrize(grad_v):
    """Symmetric part ``(G + G^T) / 2`` of a pointwise 2x2 tensor field."""
    return 0.5 * (grad_v + np.swapaxes(grad_v, 0, 1))


def sym_gradient(v, g):
    return symmetrize(velocity_gradient(v, g))


def tensor_divergence(t, g):
    """``(div T)_i = sum_j d_j T_ij``."""
    t = np.asarray(t, dtype=float)
    if t.shape != (2, 2) + g.shape:
        raise GridMismatchError(f"tensor field has shape {t.shape}")
    th = fft(t)
    return ifft(1j * g.kx * th[:, 0] + 1j * g.ky * th[:, 1])


def _project_spectral(vh, g):
    """Leray projection in Fourier space; returns (projected, potential).

    ``v = P v + grad(psi)`` with ``psi`` mean-free. Modes where the truncated
    wavenumber vanishes are left untouched.
    """
    kdotv = g.kx * vh[0] + g.ky * vh[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(g.k2 > 0, 1.0 / np.where(g.k2 > 0, g.k2, 1.0), 0.0)
    coef = kdotv * inv
    proj = np.stack([vh[0] - g.kx * coef, vh[1] - g.ky * coef])
    psi_h = -1j * coef
    return proj, psi_h


def leray_project(v, g):
    """Orthogonal projection onto divergence-free fields (mean preserved)."""
    v = check_vector(v, g)
    proj, _ = _project_spectral(fft(v), g)
    return ifft(proj)


def leray_decompose(v, g):
    """Return ``(P v, psi)`` such that ``v = P v + grad(psi)``."""
    v = check_vector(v, g)
    proj, psi_h = _project_spectral(fft(v), g)
    return ifft(proj), ifft(psi_h)


def band_limited_noise(g, rng, max_mode):
    """Gaussian noise restricted to wave indices with ``|m| <= max_mode``.

    Normalised to unit RMS; identically zero when ``max_mode`` is 0.
    """
    mx = np.abs(np.fft.fftfreq(g.nx, 1.0 / g.nx))[:, None]
    my = np.fft.rfftfreq(g.ny, 1.0 / g.ny)[None, :]
    keep = (mx <= max_mode) & (my <= max_mode) & g.mask
    keep[0, 0] = False
    white = rng.standard_normal(g.shape)
    f = ifft(fft(white) * keep)
    rms = np.sqrt(np.mean(f**2))
    return f / rms if rms > 0 else f
