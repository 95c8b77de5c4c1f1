#!/usr/bin/env python3
"""Band-coverage experiment: non-coverage proportion per grid point.

A full-scale run (N=1000 replications) takes a few hours;
the default here is a lighter N=300. Output: t,noncoverage CSV.
"""

import argparse

from shapefit.confidence import CoverageConfig, coverage_experiment
from shapefit.sim import write_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--replications", type=int, default=300)
    ap.add_argument("--bootstrap", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--output", default="coverage.csv")
    args = ap.parse_args()

    config = CoverageConfig(
        n=args.n, replications=args.replications, B=args.bootstrap, seed=args.seed
    )
    grid, noncoverage = coverage_experiment(config)
    write_rows(args.output, ["t", "noncoverage"], zip(grid, noncoverage))
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
