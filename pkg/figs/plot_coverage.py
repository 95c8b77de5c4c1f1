#!/usr/bin/env python3
"""Non-coverage proportion per grid point with the nominal level line."""

import argparse

from common import STYLE, floats, load_columns, new_axes, save


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", required=True, help="coverage CSV: t,noncoverage")
    ap.add_argument("--level", type=float, default=0.05)
    ap.add_argument("--output", required=True)
    args = ap.parse_args()

    table = load_columns(args.input, ["t", "noncoverage"])
    fig, ax = new_axes("t", "non-coverage proportion")
    ax.plot(floats(table["t"]), floats(table["noncoverage"]), color=STYLE["estimate_color"])
    ax.axhline(args.level, linestyle="--", color=STYLE["truth_color"], label=f"nominal {args.level}")
    ax.set_ylim(bottom=0.0)
    ax.legend(loc="upper right")
    save(fig, args.output)


if __name__ == "__main__":
    main()
