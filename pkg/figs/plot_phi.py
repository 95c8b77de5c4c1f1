#!/usr/bin/env python3
"""Profile of the adjoint-equation solution (zero at both endpoints)."""

import argparse

from common import STYLE, floats, load_columns, new_axes, save


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", required=True, help="CSV: v,phi")
    ap.add_argument("--output", required=True)
    args = ap.parse_args()

    table = load_columns(args.input, ["v", "phi"])
    fig, ax = new_axes("v", "phi(v)")
    ax.plot(floats(table["v"]), floats(table["phi"]), color=STYLE["truth_color"])
    ax.axhline(0.0, color="gray", linewidth=0.8)
    save(fig, args.output)


if __name__ == "__main__":
    main()
