#!/usr/bin/env python3
"""95th-percentile comparison rows (smle / weibull / lognormal)."""

import argparse
import json

from shapefit.sim import ExperimentConfig, experiment_percentile, summarize_by_method, write_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--replications", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--output", default="percentile_rows.csv")
    args = ap.parse_args()

    config = ExperimentConfig(n=args.n, replications=args.replications, seed=args.seed)
    rows = experiment_percentile(config)
    write_rows(args.output, ["replication", "method", "estimate"], rows)
    print(json.dumps(summarize_by_method(rows), indent=2))
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
