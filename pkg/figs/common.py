"""Shared plumbing for the figure scripts: strict CSV loading and
deterministic PNG output."""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "mle_color": "tab:red",
    "estimate_color": "black",
    "truth_color": "tab:blue",
    "band_color": "tab:blue",
    "band_alpha": 0.25,
    "figsize": (6.0, 4.0),
    "dpi": 150,
}


def load_columns(path, required):
    """Load a CSV as {column: list[float-or-str]}; exit 2 with a column
    diagnostic if any required column is missing."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            print(
                f"{path}: missing column(s) {missing}; found {header}",
                file=sys.stderr,
            )
            raise SystemExit(2)
        rows = list(reader)
    out = {c: [] for c in header}
    for row in rows:
        for c in header:
            out[c].append(row[c])
    return out


def floats(values):
    return [float(v) for v in values]


def new_axes(xlabel, ylabel, title=None):
    fig, ax = plt.subplots(figsize=STYLE["figsize"], dpi=STYLE["dpi"])
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    return fig, ax


def save(fig, output):
    fig.tight_layout()
    # strip ambient metadata so identical inputs give identical bytes
    fig.savefig(output, metadata={"Software": "figs"})
    plt.close(fig)
    print(f"wrote {output}")
