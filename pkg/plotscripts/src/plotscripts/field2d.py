"""Temperature field and velocity vectors from 2D snapshots, with outlines."""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from plotscripts.io import SchemaError, read_columns


def render(snapshot_path, out_path, bodies_path=None, quiver_stride=1,
           title=None):
    """Scatter of T colored per point plus a velocity quiver; body outlines
    drawn as closed black rings when a bodies CSV is given."""
    cols = read_columns(snapshot_path,
                        required=("x", "y", "rho", "ux", "uy", "T"))
    x, y = cols["x"], cols["y"]
    fig, ax = plt.subplots(figsize=(7, 6))
    sc = ax.scatter(x, y, c=cols["T"], s=6, cmap="inferno")
    fig.colorbar(sc, ax=ax, label="T")
    s = max(1, int(quiver_stride))
    speed = np.hypot(cols["ux"], cols["uy"])
    if np.max(speed) > 0:
        ax.quiver(x[::s], y[::s], cols["ux"][::s], cols["uy"][::s],
                  color="0.3", width=2e-3, alpha=0.8)
    if bodies_path:
        bod = read_columns(bodies_path, required=("body_id", "x", "y"))
        for bid in np.unique(bod["body_id"]):
            m = bod["body_id"] == bid
            bx = np.append(bod["x"][m], bod["x"][m][0])
            by = np.append(bod["y"][m], bod["y"][m][0])
            ax.plot(bx, by, "k-", lw=1.5)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(
        description="Plot temperature and velocity vectors from a 2D "
                    "snapshot CSV.")
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   help="snapshot CSV (x,y,rho,ux,uy,T); optionally followed "
                        "by a body-outline CSV (body_id,x,y)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--stride", type=int, default=1,
                   help="plot every Nth velocity vector")
    p.add_argument("--title")
    args = p.parse_args(argv)
    if len(args.inputs) > 2:
        print("error: expected at most two inputs (snapshot, bodies)",
              file=sys.stderr)
        return 1
    bodies = args.inputs[1] if len(args.inputs) == 2 else None
    try:
        render(args.inputs[0], args.out, bodies_path=bodies,
               quiver_stride=args.stride, title=args.title)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
