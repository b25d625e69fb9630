"""Log-log convergence plot with least-squares slope annotation."""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from plotscripts.io import SchemaError, read_columns


def fit_slope(dx, err):
    """Least-squares slope of log(err) against log(dx)."""
    dx = np.asarray(dx, dtype=float)
    err = np.asarray(err, dtype=float)
    if dx.size < 2:
        raise SchemaError("convergence table needs at least two rows "
                          f"(got {dx.size})")
    if np.any(dx <= 0) or np.any(err <= 0):
        raise SchemaError("dx and error values must be positive for a "
                          "log-log fit")
    return float(np.polyfit(np.log(dx), np.log(err), 1)[0])


def render(inputs, out_path, column="l1", labels=None, title=None):
    fig, ax = plt.subplots(figsize=(6, 5))
    slopes = []
    for k, path in enumerate(inputs):
        cols = read_columns(path, required=("dx", column))
        slope = fit_slope(cols["dx"], cols[column])
        slopes.append(slope)
        base = labels[k] if labels else path
        ax.loglog(cols["dx"], cols[column], "o-",
                  label=f"{base} (slope {slope:.2f})")
        # reference slope triangle anchored to the last curve
        if k == len(inputs) - 1:
            dx = np.asarray(cols["dx"])
            ref = cols[column][np.argmax(dx)] * (dx / np.max(dx)) ** round(slope)
            ax.loglog(dx, ref, "k--", lw=0.8,
                      label=f"order {round(slope)} reference")
    ax.set_xlabel("dx")
    ax.set_ylabel(f"{column.upper()} error")
    ax.grid(which="both", alpha=0.3)
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return slopes


def main(argv=None) -> int:
    p = argparse.ArgumentParser(
        description="Log-log error-vs-dx plot from convergence table CSVs, "
                    "annotated with the fitted slope.")
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   help="convergence CSV paths (dx,dt,l1,l1_order,...)")
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--column", default="l1", choices=("l1", "l2"),
                   help="error column to plot")
    p.add_argument("--label", nargs="*", help="one legend label per input")
    p.add_argument("--title")
    args = p.parse_args(argv)
    if args.label and len(args.label) != len(args.inputs):
        print("error: --label count must match --in count", file=sys.stderr)
        return 1
    try:
        slopes = render(args.inputs, args.out, column=args.column,
                        labels=args.label, title=args.title)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path, slope in zip(args.inputs, slopes):
        print(f"{path}: fitted slope {slope:.6f}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
