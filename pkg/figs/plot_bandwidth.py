#!/usr/bin/env python3
"""Locally selected bandwidth next to the simulation-optimal curve."""

import argparse

from common import STYLE, floats, load_columns, new_axes, save


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", required=True, help="CSV: t,selected[,optimal]")
    ap.add_argument("--output", required=True)
    args = ap.parse_args()

    table = load_columns(args.input, ["t", "selected"])
    t = floats(table["t"])
    fig, ax = new_axes("t", "bandwidth")
    ax.plot(t, floats(table["selected"]), color=STYLE["truth_color"], label="bootstrap selection")
    if "optimal" in table:
        ax.plot(
            t,
            floats(table["optimal"]),
            linestyle="--",
            color=STYLE["mle_color"],
            label="simulation optimal",
        )
    ax.set_ylim(bottom=0.0)
    ax.legend(loc="upper right")
    save(fig, args.output)


if __name__ == "__main__":
    main()
