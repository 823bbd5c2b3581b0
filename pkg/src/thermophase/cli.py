"""Command-line entry point: ``thermophase run|audit|mms``.

Exit codes: 0 success, 2 configuration error, 3 positivity/solver failure,
4 I/O failure.
"""
from __future__ import annotations

import argparse
import glob
import json
import logging
import os
import sys

import numpy as np

from . import audit as au
from .errors import ConfigError, SnapshotError, SolverError
from .io import (
    Config,
    load_config,
    read_snapshot,
    resolve_out_dir,
    write_diagnostics,
)
from .state import Trajectory

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4
N_TEST_FUNCTIONS = 3


def _say(args, *msg):
    if not args.quiet:
        print(*msg)


def weak_form_report(traj, seed, n=N_TEST_FUNCTIONS):
    """Weak energy residuals and entropy-inequality margins for seeded test functions."""
    t_final = traj.times[-1]
    if len(traj.snapshots) < 2 or t_final <= 0:
        return {"energy_residuals": [], "entropy_defects": [], "entropy_defects_full": [],
                "entropy_tolerances": []}
    res, ent, full, tol = [], [], [], []
    for k in range(n):
        xi = au.TestFunction.random(t_final, seed + k)
        res.append(au.weak_energy_residual(traj, xi))
        xi_pos = au.TestFunction.random(t_final, seed + 100 + k, nonnegative=True)
        ent.append(au.weak_entropy_check(traj, xi_pos))
        full.append(au.weak_entropy_check(traj, xi_pos, contraction="full"))
        tol.append(au.entropy_tolerance(traj, xi_pos))
    return {"energy_residuals": res, "entropy_defects": ent, "entropy_defects_full": full,
            "entropy_tolerances": tol}


def _summary(traj, weak):
    recs = traj.records
    first, last = recs[0], recs[-1]
    lines = [
        f"steps            {len(recs) - 1}",
        f"t_final          {last.t:.6g}",
        f"mass drift       {abs(last.mean_phi - first.mean_phi):.3e}",
        f"energy drift     {abs(last.total_energy - first.total_energy):.3e}",
        f"entropy change   {last.entropy - first.entropy:+.3e}",
        f"theta range      [{min(r.theta_min for r in recs):.6g}, {max(r.theta_max for r in recs):.6g}]",
    ]
    for i, (e, d, t) in enumerate(zip(weak["energy_residuals"], weak["entropy_defects"],
                                      weak["entropy_tolerances"])):
        lines.append(f"test fn {i}: energy residual {e:+.3e}, entropy defect {d:+.3e} "
                     f"({'ok' if d <= t else 'VIOLATED'}, tol {t:.2e})")
    return "\n".join(lines)


def cmd_run(args):
    from .sim import run, write_run

    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.replace(initial={"seed": args.seed})
    out_dir = resolve_out_dir(cfg, args.out_dir)

    def progress(k, n, rec):
        if not args.quiet and (k % max(1, n // 10) == 0 or k == n):
            print(f"  step {k}/{n}  t={rec.t:.4g}  E={rec.total_energy:.10g}  "
                  f"theta_min={rec.theta_min:.4g}", flush=True)

    traj = run(cfg, progress=progress)
    write_run(cfg, traj, out_dir)
    weak = weak_form_report(traj, cfg.initial.seed)
    with open(os.path.join(out_dir, "audit.json"), "w") as fh:
        json.dump(weak, fh, indent=2)
    _say(args, _summary(traj, weak))
    _say(args, f"wrote {out_dir}")
    return EXIT_OK


def _find_config(snap_dir):
    for cand in (os.path.join(snap_dir, "config.ini"), os.path.join(snap_dir, os.pardir, "config.ini")):
        if os.path.isfile(cand):
            return load_config(cand)
    return Config()


def load_trajectory(snap_dir):
    """Rebuild a Trajectory from a directory of ``*.thpf`` snapshots."""
    if not os.path.isdir(snap_dir):
        raise SnapshotError(f"{snap_dir}: not a directory")
    files = sorted(glob.glob(os.path.join(snap_dir, "*.thpf")))
    if not files and os.path.isdir(os.path.join(snap_dir, "snapshots")):
        files = sorted(glob.glob(os.path.join(snap_dir, "snapshots", "*.thpf")))
    if not files:
        raise SnapshotError(f"{snap_dir}: no snapshot files found")
    cfg = _find_config(snap_dir)
    states, grid = [], None
    for f in files:
        s, g = read_snapshot(f)
        if grid is not None and g != grid:
            raise SnapshotError(f"{f}: grid differs from the first snapshot")
        grid = g
        states.append(s)
    states.sort(key=lambda s: s.t)
    times = np.array([s.t for s in states])
    if np.any(np.diff(times) <= 0):
        raise SnapshotError(f"{snap_dir}: snapshot times are not strictly increasing")
    return Trajectory(grid=grid, params=cfg.make_params(), snapshots=states, nominal_dt=cfg.time.dt), cfg


def cmd_audit(args):
    traj, cfg = load_trajectory(args.snapshot_dir)
    g, p = traj.grid, traj.params
    traj.records = [au.diagnostics(s, g, p, traj.nominal_dt) for s in traj.snapshots]
    traj.bounds = au.apriori_monitor(traj, p)
    weak = weak_form_report(traj, cfg.initial.seed if args.seed is None else args.seed)

    out_dir = args.out_dir or args.snapshot_dir
    os.makedirs(out_dir, exist_ok=True)
    write_diagnostics(traj.records, os.path.join(out_dir, "audit_diagnostics.csv"))
    with open(os.path.join(out_dir, "audit.json"), "w") as fh:
        json.dump({"bounds": traj.bounds.as_dict(), **weak}, fh, indent=2)
    _say(args, _summary(traj, weak))
    for k, v in traj.bounds.as_dict().items():
        _say(args, f"  {k:34s} {v:.6e}")
    return EXIT_OK


def cmd_mms(args):
    from .mms import convergence_table

    rows = convergence_table(args.eq, args.levels)
    _say(args, f"{'level':>5} {'n':>5} {'dt':>10} {'L2 error':>12} {'ratio':>7}")
    for level, n, dt, err, ratio in rows:
        print(f"{level:5d} {n:5d} {dt:10.3e} {err:12.4e} {ratio:7.3f}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="thermophase", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the random seed")
    common.add_argument("--out-dir", default=None, help="output directory (overrides config and env)")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="simulate a configuration and audit it")
    r.add_argument("config")
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("audit", parents=[common], help="recompute diagnostics from snapshots")
    a.add_argument("snapshot_dir")
    a.set_defaults(func=cmd_audit)

    m = sub.add_parser("mms", parents=[common], help="manufactured-solution convergence table")
    m.add_argument("--eq", choices=("ch", "ns", "heat"), required=True)
    m.add_argument("--levels", type=int, default=3)
    m.set_defaults(func=cmd_mms)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "mms" and not 0 <= args.levels <= 4:
            raise ConfigError(f"--levels must be in [0, 4], got {args.levels}")
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, FloatingPointError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:  # includes SnapshotError
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
