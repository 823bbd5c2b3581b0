"""Auditing a trajectory against the weak energy and entropy relations.

The energy residual is a discretisation error that halves with dt; the
entropy defect must stay below its tolerance for nonnegative test functions.
"""
from thermophase import Config, run
from thermophase.audit import TestFunction, entropy_tolerance, weak_energy_residual, weak_entropy_check

base = Config().replace(grid={"nx": 32, "ny": 32}, time={"t_final": 0.1}, output={"snap_every": 1},
                        initial={"scenario": "spinodal_shear"})
coarse = run(base)
fine = run(base.replace(time={"dt": base.time.dt / 2}))

for seed in range(3):
    xi = TestFunction.random(0.1, seed)
    r1, r2 = weak_energy_residual(coarse, xi), weak_energy_residual(fine, xi)
    print(f"test fn {seed}: energy residual {r1:+.3e} -> {r2:+.3e} (ratio {r1 / r2:.2f})")

for seed in range(3):
    xi = TestFunction.random(0.1, seed, nonnegative=True)
    d, tol = weak_entropy_check(coarse, xi), entropy_tolerance(coarse, xi)
    print(f"test fn {seed}: entropy defect {d:+.3e}  tolerance {tol:.3e}")

print("sym vs full strain contraction (seed 0):",
      weak_entropy_check(coarse, TestFunction.random(0.1, 0, nonnegative=True)),
      weak_entropy_check(coarse, TestFunction.random(0.1, 0, nonnegative=True), contraction="full"))
