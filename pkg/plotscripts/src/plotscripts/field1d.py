"""Line plots of density, mean velocity, and temperature from 1D snapshots."""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from plotscripts.io import SchemaError, read_columns


def render(inputs, out_path, labels=None, title=None):
    """Three stacked panels (rho, ux, T vs x); one curve per input CSV."""
    fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
    for k, path in enumerate(inputs):
        cols = read_columns(path, required=("x", "rho", "ux", "T"))
        order = np.argsort(cols["x"])
        x = cols["x"][order]
        label = labels[k] if labels else path
        axes[0].plot(x, cols["rho"][order], lw=1.2, label=label)
        axes[1].plot(x, cols["ux"][order], lw=1.2, label=label)
        axes[2].plot(x, cols["T"][order], lw=1.2, label=label)
    for ax, name in zip(axes, (r"$\rho$", r"$u_x$", r"$T$")):
        ax.set_ylabel(name)
        ax.grid(alpha=0.3)
    axes[2].set_xlabel("x")
    if len(inputs) > 1 or labels:
        axes[0].legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(
        description="Plot rho, ux, T profiles from 1D snapshot CSVs.")
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   help="snapshot CSV paths (x,rho,ux,T)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--label", nargs="*", help="one legend label per input")
    p.add_argument("--title")
    args = p.parse_args(argv)
    if args.label and len(args.label) != len(args.inputs):
        print("error: --label count must match --in count", file=sys.stderr)
        return 1
    try:
        render(args.inputs, args.out, labels=args.label, title=args.title)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
