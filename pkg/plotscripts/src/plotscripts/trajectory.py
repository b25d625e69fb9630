"""Body position and velocity versus time, with equilibrium reference line."""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from plotscripts.io import SchemaError, read_columns


def render(inputs, out_path, equilibrium=None, labels=None, title=None):
    """Two stacked panels: center position and velocity against time.

    Accepts the 1D trajectory schema (t,xc,vx) and the 2D schema
    (t,xc,yc,vx,vy,omega); only the x components are plotted.  A dashed
    horizontal line marks ``equilibrium`` on the position panel.
    """
    fig, (ax_x, ax_v) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for k, path in enumerate(inputs):
        cols = read_columns(path, required=("t", "xc", "vx"))
        label = labels[k] if labels else path
        ax_x.plot(cols["t"], cols["xc"], lw=1.2, label=label)
        ax_v.plot(cols["t"], cols["vx"], lw=1.2, label=label)
    if equilibrium is not None:
        ax_x.axhline(equilibrium, color="k", ls="--", lw=1.0,
                     label=f"equilibrium {equilibrium:g}")
    ax_x.set_ylabel("position")
    ax_v.set_ylabel("velocity")
    ax_v.set_xlabel("t")
    for ax in (ax_x, ax_v):
        ax.grid(alpha=0.3)
    ax_x.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(
        description="Plot body position and velocity vs time from "
                    "trajectory CSVs.")
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   help="trajectory CSV paths (t,xc,vx[,...])")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--equilibrium", type=float,
                   help="draw a dashed reference line at this position")
    p.add_argument("--label", nargs="*", help="one legend label per input")
    p.add_argument("--title")
    args = p.parse_args(argv)
    if args.label and len(args.label) != len(args.inputs):
        print("error: --label count must match --in count", file=sys.stderr)
        return 1
    try:
        render(args.inputs, args.out, equilibrium=args.equilibrium,
               labels=args.label, title=args.title)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
