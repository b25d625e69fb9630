"""CSV artifacts: field snapshots and body trajectories.

All values are written with 17 significant digits so a read back
reproduces the float64 bit patterns exactly; row order is point order.
"""

from __future__ import annotations

import csv
import os

import numpy as np

FLOAT_FMT = "%.17g"


def _write_table(path, header, columns):
    rows = np.column_stack(columns)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, rows, fmt=FLOAT_FMT, delimiter=",")


def write_snapshot(path, x, rho, U, T):
    """Field snapshot CSV: x[,y],rho,ux[,uy],T, one row per point."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if x.shape[1] == 1:
        header = ["x", "rho", "ux", "T"]
        cols = [x[:, 0], rho, U[:, 0], T]
    else:
        header = ["x", "y", "rho", "ux", "uy", "T"]
        cols = [x[:, 0], x[:, 1], rho, U[:, 0], U[:, 1], T]
    _write_table(path, header, cols)


def write_trajectory(path, records, dim: int):
    """Body trajectory CSV from a list of per-step records."""
    t = np.array([r.t for r in records])
    xc = np.array([r.Xc for r in records])
    v = np.array([r.V for r in records])
    if dim == 1:
        header = ["t", "xc", "vx"]
        cols = [t, xc[:, 0], v[:, 0]]
    else:
        omega = np.array([r.omega for r in records])
        header = ["t", "xc", "yc", "vx", "vy", "omega"]
        cols = [t, xc[:, 0], xc[:, 1], v[:, 0], v[:, 1], omega]
    _write_table(path, header, cols)


def write_probe(path, positions, rho, U, T):
    """Probe-grid CSV in the same schema as a field snapshot."""
    write_snapshot(path, positions, rho, U, T)


def write_outlines(path, bodies):
    """Body outline CSV: body_id,x,y per surface sample, in ring order."""
    ids, xs, ys = [], [], []
    for b in bodies:
        pos = np.atleast_2d(b.surface_positions())
        ids.extend([float(b.body_id)] * pos.shape[0])
        xs.extend(pos[:, 0])
        ys.extend(pos[:, 1] if pos.shape[1] > 1 else np.zeros(pos.shape[0]))
    _write_table(path, ["body_id", "x", "y"],
                 [np.asarray(ids), np.asarray(xs), np.asarray(ys)])


def write_convergence(path, table):
    """Convergence table CSV: dx,dt,l1,l1_order,l2,l2_order per ladder row."""
    header = ["dx", "dt", "l1", "l1_order", "l2", "l2_order"]
    cols = [np.asarray([row[k] for row in table], dtype=float) for k in
            ("dx", "dt", "l1", "l1_order", "l2", "l2_order")]
    _write_table(path, header, cols)


def read_csv(path):
    """Read a CSV written by this module into a dict of float columns."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader if row]
    arr = np.asarray(data, dtype=float).reshape(len(data), len(header))
    return {name: arr[:, j] for j, name in enumerate(header)}
