#!/usr/bin/env python3
"""Confidence band overlay: band + smooth estimate, optional step MLE
(post-step joins) and dashed truth curve."""

import argparse

from common import STYLE, floats, load_columns, new_axes, save


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", required=True, help="band CSV: t,lower,estimate,upper")
    ap.add_argument("--mle", help="optional step CDF CSV: x,cdf")
    ap.add_argument("--truth", help="optional truth CSV: x,cdf")
    ap.add_argument("--output", required=True)
    args = ap.parse_args()

    band = load_columns(args.input, ["t", "lower", "estimate", "upper"])
    t = floats(band["t"])
    fig, ax = new_axes("t", "distribution function")
    ax.fill_between(
        t,
        floats(band["lower"]),
        floats(band["upper"]),
        color=STYLE["band_color"],
        alpha=STYLE["band_alpha"],
        label="95% band",
    )
    ax.plot(t, floats(band["estimate"]), color=STYLE["estimate_color"], label="smoothed estimate")
    if args.mle:
        mle = load_columns(args.mle, ["x", "cdf"])
        ax.step(
            floats(mle["x"]),
            floats(mle["cdf"]),
            where="post",
            color=STYLE["mle_color"],
            label="step MLE",
        )
    if args.truth:
        truth = load_columns(args.truth, ["x", "cdf"])
        ax.plot(
            floats(truth["x"]),
            floats(truth["cdf"]),
            linestyle="--",
            color=STYLE["truth_color"],
            label="truth",
        )
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="lower right")
    save(fig, args.output)


if __name__ == "__main__":
    main()
