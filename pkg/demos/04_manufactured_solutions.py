"""Convergence of each sub-step against manufactured solutions.

Grid and step are refined together; the time error dominates, so each
halving of dt should roughly halve the error.
"""
from thermophase import mms

for eq in mms.EQUATIONS:
    print(eq)
    for level, n, dt, err, ratio in mms.convergence_table(eq, 3):
        print(f"  level {level}  n={n:3d}  dt={dt:.2e}  error={err:.3e}  ratio={ratio:.2f}")
