"""Spectral operators on a periodic box.

Differentiates a few trigonometric polynomials, checks the results against
their closed forms, and shows the Leray projection removing a gradient.
"""
import numpy as np

from thermophase import grid as gr

g = gr.Grid(32, 32, 2 * np.pi, 4 * np.pi)
x, y = g.coords()

f = np.sin(2 * x) * np.cos(y / 2)
print("grad error      ", np.max(np.abs(gr.gradient(f, g)[0] - 2 * np.cos(2 * x) * np.cos(y / 2))))
print("laplacian error ", np.max(np.abs(gr.laplacian(f, g) + (4 + 0.25) * f)))

# a rotational field plus a gradient: projection keeps only the former
psi = np.cos(x) * np.sin(y)
rot = np.stack([np.cos(x) * np.cos(y), np.sin(x) * np.sin(y)])
mixed = rot + gr.gradient(psi, g)
proj = gr.leray_project(mixed, g)
print("div before/after", gr.l2_norm(gr.divergence(mixed, g), g), gr.l2_norm(gr.divergence(proj, g), g))
print("recovers rot    ", np.max(np.abs(proj - rot)))
