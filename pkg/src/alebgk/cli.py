"""Command line interface.

Subcommands:
  run       execute a scenario (preset name or YAML path), write CSV output
  converge  run a dx ladder for a scenario and report errors/orders
  riemann   sample the exact Euler-gas Riemann solution to CSV
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from alebgk.errors import AleBgkError, ConfigurationError
from alebgk.output import (
    write_convergence,
    write_probe,
    write_snapshot,
    write_outlines,
    write_trajectory,
)
from alebgk.riemann import euler_riemann_exact
from alebgk.scenarios import (
    convergence_harness,
    load_config,
    load_preset,
    preset_names,
    run,
    sample_probe,
)


def _resolve_config(token: str):
    if os.path.exists(token):
        return load_config(token)
    return load_preset(token)


def _apply_overrides(cfg, args):
    changes = {}
    if getattr(args, "scheme", None):
        changes["scheme"] = args.scheme
    if getattr(args, "t_final", None) is not None:
        changes["t_final"] = args.t_final
    if getattr(args, "dx", None) is not None:
        changes["dx"] = args.dx
    if getattr(args, "full_scale", False):
        full = cfg.params.get("full")
        if not full:
            raise ConfigurationError(
                f"scenario {cfg.name!r} has no full-scale settings")
        changes.update(full)
    if changes:
        cfg = cfg.replace(**changes)
    return cfg


def _set_threads(n: int | None):
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def _cmd_run(args) -> int:
    cfg = _apply_overrides(_resolve_config(args.config), args)
    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    report = run(cfg, snapshot_every=args.snapshot_every)
    for i, snap in enumerate(report.snapshots):
        label = f"{i:04d}" if args.snapshot_every else ("final" if i else "init")
        write_snapshot(os.path.join(out, f"snapshot_{label}.csv"),
                       snap.x, snap.rho, snap.U, snap.T)
    if report.body_history:
        dim = report.final.x.shape[1]
        write_trajectory(os.path.join(out, "trajectory.csv"),
                         report.body_history, dim)
    if report.sim.bodies and report.final.x.shape[1] == 2:
        write_outlines(os.path.join(out, "bodies.csv"), report.sim.bodies)
    pos, rho, U, T = sample_probe(report.sim, report.domain, cfg.probe_points)
    write_probe(os.path.join(out, "probe.csv"), pos, rho, U, T)
    print(f"{cfg.name}: {report.n_steps} steps to t={report.final.t:.8g} "
          f"in {report.wall_time:.2f}s, {report.final.x.shape[0]} points, "
          f"output in {out}")
    return 0


def _cmd_converge(args) -> int:
    cfg = _apply_overrides(_resolve_config(args.config), args)
    ladder = [float(v) for v in args.ladder.split(",")]
    if len(ladder) < 2:
        raise ConfigurationError("ladder needs at least two dx values")
    rows = convergence_harness(cfg, ladder, dt_mode=args.dt_mode)
    os.makedirs(args.out_dir, exist_ok=True)
    path = os.path.join(args.out_dir, "convergence.csv")
    write_convergence(path, rows)
    print(f"{'dx':>12} {'dt':>12} {'L1':>12} {'order':>7} "
          f"{'L2':>12} {'order':>7}")
    for r in rows:
        print(f"{r['dx']:12.5g} {r['dt']:12.5g} {r['l1']:12.5g} "
              f"{r['l1_order']:7.3f} {r['l2']:12.5g} {r['l2_order']:7.3f}")
    print(f"written to {path}")
    return 0


def _cmd_riemann(args) -> int:
    left = [float(v) for v in args.left.split(",")]
    right = [float(v) for v in args.right.split(",")]
    if len(left) != 3 or len(right) != 3:
        raise ConfigurationError("states must be rho,u,p triples")
    sol = euler_riemann_exact(left, right, gamma=args.gamma)
    xs = np.linspace(args.xmin, args.xmax, args.n)
    rho, u, p = sol((xs - args.x0) / args.t)
    os.makedirs(args.out_dir, exist_ok=True)
    path = os.path.join(args.out_dir, "riemann.csv")
    T = p / (rho * args.gas_constant)
    write_snapshot(path, xs[:, None], rho, u[:, None], T)
    print(f"exact solution at t={args.t} written to {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alebgk",
        description="Meshfree ALE solver for the BGK kinetic model. "
                    f"Presets: {', '.join(preset_names())}.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario to t_final")
    p_run.add_argument("config", help="preset name or YAML config path")
    p_run.add_argument("--out-dir", default="out")
    p_run.add_argument("--snapshot-every", type=int, default=0,
                       help="also write a snapshot every N steps")
    p_run.add_argument("--scheme", default=None,
                       help="first-order | ARS(2,2,1) | ARS(2,2,2)")
    p_run.add_argument("--t-final", type=float, default=None)
    p_run.add_argument("--dx", type=float, default=None)
    p_run.add_argument("--full-scale", action="store_true",
                       help="use the scenario's full-resolution settings")
    p_run.add_argument("--threads", type=int, default=None)
    p_run.set_defaults(func=_cmd_run)

    p_cv = sub.add_parser("converge", help="grid-refinement study")
    p_cv.add_argument("config", help="preset name or YAML config path")
    p_cv.add_argument("--ladder", required=True,
                      help="comma-separated dx values, finest last is "
                           "used as the reference")
    p_cv.add_argument("--out-dir", default="out")
    p_cv.add_argument("--dt-mode", default="shared",
                      choices=("shared", "scaled"),
                      help="shared: every level runs at the reference "
                           "level's dt (isolates spatial order); scaled: "
                           "dt shrinks proportionally to dx")
    p_cv.add_argument("--scheme", default=None)
    p_cv.add_argument("--t-final", type=float, default=None)
    p_cv.add_argument("--threads", type=int, default=None)
    p_cv.set_defaults(func=_cmd_converge)

    p_rm = sub.add_parser("riemann",
                          help="exact Euler Riemann solution sampler")
    p_rm.add_argument("left", help="rho,u,p of the left state")
    p_rm.add_argument("right", help="rho,u,p of the right state")
    p_rm.add_argument("t", type=float, help="sampling time > 0")
    p_rm.add_argument("--gamma", type=float, default=5.0 / 3.0)
    p_rm.add_argument("--gas-constant", type=float, default=1.0)
    p_rm.add_argument("--x0", type=float, default=0.0,
                      help="initial discontinuity position")
    p_rm.add_argument("--xmin", type=float, default=-0.5)
    p_rm.add_argument("--xmax", type=float, default=0.5)
    p_rm.add_argument("-n", type=int, default=401)
    p_rm.add_argument("--out-dir", default="out")
    p_rm.set_defaults(func=_cmd_riemann)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _set_threads(getattr(args, "threads", None))
    try:
        return args.func(args)
    except (AleBgkError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
