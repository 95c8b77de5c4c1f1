#!/usr/bin/env python3
"""Optimality diagnostics of the incubation MLE: the marginal-value
process sample and the self-induced cusum diagram, side by side."""

import argparse

import matplotlib.pyplot as plt

from common import STYLE, load_columns, save


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", required=True, help="diagnostics CSV: kind,x,y")
    ap.add_argument("--output", required=True)
    args = ap.parse_args()

    table = load_columns(args.input, ["kind", "x", "y"])
    w_pts = [(float(x), float(y)) for k, x, y in zip(table["kind"], table["x"], table["y"]) if k == "w"]
    cusum = [(float(x), float(y)) for k, x, y in zip(table["kind"], table["x"], table["y"]) if k == "cusum"]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6), dpi=STYLE["dpi"])
    if w_pts:
        xs, ys = zip(*w_pts)
        ax1.plot(xs, ys, marker=".", linestyle="-", color=STYLE["truth_color"], markersize=3)
    ax1.axhline(0.0, color="gray", linewidth=0.8)
    ax1.set_xlabel("t")
    ax1.set_ylabel("marginal-value process")
    if cusum:
        xs, ys = zip(*cusum)
        ax2.plot(xs, ys, marker=".", linestyle="-", color=STYLE["mle_color"], markersize=3)
    ax2.set_xlabel("cumulative weight")
    ax2.set_ylabel("cusum ordinate")
    save(fig, args.output)


if __name__ == "__main__":
    main()
