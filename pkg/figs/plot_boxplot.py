#!/usr/bin/env python3
"""Per-method boxplot of experiment rows, with an optional reference line."""

import argparse
import math

from common import STYLE, load_columns, new_axes, save


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", required=True, help="rows CSV: replication,method,estimate")
    ap.add_argument("--reference", type=float, help="true value drawn as a red line")
    ap.add_argument("--ylabel", default="estimate")
    ap.add_argument("--output", required=True)
    args = ap.parse_args()

    rows = load_columns(args.input, ["replication", "method", "estimate"])
    groups = {}
    for method, value in zip(rows["method"], rows["estimate"]):
        v = float(value)
        if math.isfinite(v):
            groups.setdefault(method, []).append(v)

    fig, ax = new_axes("method", args.ylabel)
    labels = list(groups)
    ax.boxplot([groups[m] for m in labels], tick_labels=labels)
    if args.reference is not None:
        ax.axhline(args.reference, color=STYLE["mle_color"], label="true value")
        ax.legend(loc="upper left")
    save(fig, args.output)


if __name__ == "__main__":
    main()
