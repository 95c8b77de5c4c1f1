"""Command-line entry point.

Each subcommand is a thin adapter over the library: same seeds, same
defaults, byte-identical numbers. Floats are serialized with 17
significant digits so CSV outputs round-trip exactly.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
``SHAPEFIT_LOG`` sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .bandwidth import BandwidthPlan, bandwidth_criterion, select_bandwidth_global, select_bandwidth_local
from .confidence import CoverageConfig, coverage_experiment, cs_ci_studentized, incubation_ci
from .current_status import cs_mle, load_current_status_csv, smle_curve
from .functionals import asymptotic_variance_mean, mean_of_mle, smle_asymptotic_variance, smle_quantile
from .incubation import (
    IcmError,
    fenchel_gap,
    g_process,
    inc_mle,
    load_incubation_csv,
    w_process,
)
from .laws import law_from_config
from .parametric import fit_parametric
from .sim import (
    FLOAT_FMT,
    ExperimentConfig,
    experiment_mean,
    experiment_percentile,
    gen_current_status,
    gen_incubation,
    summarize_by_method,
    write_rows,
)

log = logging.getLogger("shapefit.cli")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x) -> str:
    return FLOAT_FMT % float(x)


def _parse_grid(text: str) -> np.ndarray:
    try:
        a, b, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must be a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise UsageError(f"bad grid range {text!r}")
    count = int(round((b - a) / step)) + 1
    return a + step * np.arange(count)


def _load(args):
    if args.model == "current-status":
        return load_current_status_csv(args.input)
    data = load_incubation_csv(args.input)
    if args.domain is not None:
        # records whose window lies entirely beyond the support bound
        # carry no information about the distribution on [0, domain]
        from .incubation import IncubationData

        data = IncubationData.create(data.e, data.s, incubation_upper=args.domain)
    return data


def _model_mle(args, data):
    if args.model == "current-status":
        return cs_mle(data)
    return inc_mle(data)


def _require_domain(args):
    if args.domain is not None:
        return args.domain
    if args.model == "current-status":
        raise UsageError("--domain is required for current-status smoothing")
    return 20.0


def _write_step_csv(path, dist):
    write_rows(path, ["x", "cdf"], zip(dist.points, np.cumsum(dist.masses)))


def _cmd_mle(args):
    data = _load(args)
    dist = _model_mle(args, data)
    _write_step_csv(args.output, dist)
    if args.diagnostics:
        if args.model != "incubation":
            raise UsageError("--diagnostics requires --model incubation")
        wp = w_process(dist, data)
        gp_pts, gp_vals = g_process(dist, data)
        rows = [("w", x, y) for x, y in zip(wp.eval_points, wp.values)]
        rows += [("cusum", g, v) for g, v in _cusum_points(dist, data, gp_pts, gp_vals)]
        write_rows(args.diagnostics, ["kind", "x", "y"], rows)
        violation, complement = fenchel_gap(dist, data)
        log.info("fenchel gap: violation=%.3e complementarity=%.3e", violation, complement)
    return 0


def _cusum_points(dist, data, gp_pts, gp_vals):
    # self-induced cusum: (G(t), integral of F dG over [0, t] + W(t));
    # W and G share the same pooled evaluation grid
    wp = w_process(dist, data)
    f_vals = dist.cdf(gp_pts)
    dg = np.diff(gp_vals, prepend=0.0)
    v = np.cumsum(f_vals * dg) + wp.values
    return zip(gp_vals, v)


def _cmd_smle(args):
    data = _load(args)
    domain = _require_domain(args)
    if args.bandwidth is None:
        raise UsageError("--bandwidth is required")
    dist = _model_mle(args, data)
    grid = _parse_grid(args.grid) if args.grid else np.linspace(0.0, domain, 101)
    curve = smle_curve(dist, args.bandwidth, grid, domain)
    write_rows(args.output, ["x", "cdf"], zip(curve.grid, curve.values))
    return 0


def _cmd_bandwidth(args):
    data = _load(args)
    domain = _require_domain(args)
    plan = BandwidthPlan.from_config(_read_json(args.config)) if args.config else BandwidthPlan()
    if args.seed is not None:
        plan = BandwidthPlan(c0=plan.c0, c_grid=plan.c_grid, B=plan.B, seed=args.seed, targets=plan.targets)
    if args.local is not None:
        h = select_bandwidth_local(data, args.local, plan, domain)
        targets = [args.local]
    else:
        if args.grid:
            targets = _parse_grid(args.grid)
        elif plan.targets:
            targets = np.asarray(plan.targets, dtype=np.float64)
        else:
            raise UsageError("provide --grid, --local, or plan targets")
        h = select_bandwidth_global(data, targets, plan, domain)
    candidates, criterion = bandwidth_criterion(data, targets, plan, domain)
    _write_json(
        args.output,
        {
            "bandwidth": h,
            "candidates": list(candidates),
            "criterion": list(criterion),
            "pilot_bandwidth": plan.pilot_bandwidth(len(data)),
        },
    )
    return 0


def _cmd_ci(args):
    data = _load(args)
    domain = _require_domain(args)
    if args.bandwidth is None or args.pilot is None:
        raise UsageError("--bandwidth and --pilot are required")
    grid = _parse_grid(args.grid) if args.grid else np.linspace(0.0, domain, 101)[1:-1]
    fn = cs_ci_studentized if args.model == "current-status" else incubation_ci
    band = fn(data, grid, args.bandwidth, args.pilot, args.bootstrap, args.alpha, args.seed, domain)
    write_rows(args.output, ["t", "lower", "estimate", "upper"], band.to_rows())
    if band.skipped:
        log.warning("skipped %d degenerate bootstrap entries", band.skipped)
    return 0


def _cmd_fit(args):
    data = load_incubation_csv(args.input)
    fit = fit_parametric(data, args.family, truncation=args.truncation)
    params = {
        "alpha": fit.params.alpha,
        "beta": fit.params.beta,
    }
    if args.family == "weibull":
        params["truncation"] = fit.params.truncation
    _write_json(
        args.output,
        {"family": fit.family, "params": params, "loglik": fit.loglik, "starts_ok": fit.n_starts_ok},
    )
    return 0


def _cmd_quantile(args):
    data = _load(args)
    domain = _require_domain(args)
    if args.bandwidth is None:
        raise UsageError("--bandwidth is required")
    dist = _model_mle(args, data)
    curve = smle_curve(dist, args.bandwidth, np.linspace(0.0, domain, 201), domain)
    result = smle_quantile(curve, args.p)
    _write_json(args.output, {"p": args.p, "value": result.value, "at_boundary": result.at_boundary})
    return 0


def _cmd_mean(args):
    data = _load(args)
    dist = _model_mle(args, data)
    _write_json(args.output, {"mean": mean_of_mle(dist), "total_mass": dist.total_mass})
    return 0


def _cmd_variance(args):
    cfg = _read_json(args.config)
    truth = law_from_config(cfg["truth"])
    exposure = law_from_config(cfg["exposure"])
    upper = float(cfg.get("upper", truth.support[1]))
    grid_size = int(cfg.get("grid_size", 400))
    if args.functional == "mean":
        report = asymptotic_variance_mean(truth.cdf, exposure, grid_size, upper)
        payload = {
            "sigma2": report.sigma2,
            "grid": report.grid_size,
            "residual": report.residual,
            "refinement_delta": report.refinement_delta,
        }
    else:
        sigma2 = smle_asymptotic_variance(
            truth.cdf,
            exposure,
            float(cfg["t"]),
            float(cfg["bandwidth"]),
            int(cfg["n"]),
            grid_size,
            upper,
        )
        payload = {"sigma2": sigma2, "grid": grid_size, "residual": 0.0}
    _write_json(args.output, payload)
    return 0


def _cmd_simulate(args):
    cfg = _read_json(args.config)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    n = int(cfg["n"])
    truth = law_from_config(cfg["truth"])
    model = cfg.get("model", "incubation")
    if model == "current-status":
        obs = law_from_config(cfg["observation"])
        data = gen_current_status(n, truth, obs, seed)
        write_rows(args.output, ["t", "delta"], zip(data.t, data.delta.astype(int)))
    elif model == "incubation":
        exposure = law_from_config(cfg["exposure"])
        data = gen_incubation(n, truth, exposure, seed)
        write_rows(args.output, ["e", "s"], zip(data.e, data.s))
    else:
        raise ValueError(f"unknown model {model!r}")
    return 0


def _cmd_experiment(args):
    cfg = _read_json(args.config)
    kind = cfg.get("experiment")
    output = args.output or cfg.get("output")
    if not output:
        raise UsageError("provide --output or an 'output' field in the config")
    if kind == "coverage":
        cov_args = {k: v for k, v in cfg.items() if k not in ("experiment", "output")}
        if args.seed is not None:
            cov_args["seed"] = args.seed
        config = CoverageConfig(**cov_args)
        grid, noncoverage = coverage_experiment(config)
        write_rows(output, ["t", "noncoverage"], zip(grid, noncoverage))
        return 0
    if kind in ("percentile", "mean"):
        config = ExperimentConfig.from_json(args.config)
        if args.seed is not None:
            config = ExperimentConfig(**{**config.__dict__, "seed": args.seed})
        rows = experiment_percentile(config) if kind == "percentile" else experiment_mean(config)
        write_rows(output, ["replication", "method", "estimate"], rows)
        log.info("summary: %s", json.dumps(summarize_by_method(rows)))
        return 0
    raise ValueError(f"unknown experiment kind {kind!r}")


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, default=float)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def build_parser() -> _Parser:
    parser = _Parser(prog="shapefit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"shapefit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True, output_required=True):
        if model:
            p.add_argument("--model", choices=["current-status", "incubation"], required=True)
            p.add_argument("--input", required=True, help="input CSV (t,delta or e,s)")
        p.add_argument("--output", required=output_required, help="output path")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--domain", type=float, default=None, help="upper support endpoint")
        p.add_argument("--threads", type=int, default=None, help="cap BLAS worker threads")

    p = sub.add_parser("mle", help="step MLE as x,cdf CSV")
    common(p)
    p.add_argument("--diagnostics", default=None, help="write W-process/cusum CSV (incubation)")
    p.set_defaults(fn=_cmd_mle)

    p = sub.add_parser("smle", help="smoothed MLE on a grid")
    common(p)
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--grid", help="a:b:step")
    p.set_defaults(fn=_cmd_smle)

    p = sub.add_parser("bandwidth", help="smoothed-bootstrap bandwidth selection")
    common(p, output_required=False)
    p.add_argument("--config", help="JSON plan {c0,c_grid,B,seed,targets}")
    p.add_argument("--grid", help="a:b:step global target grid")
    p.add_argument("--local", type=float, help="single target point")
    p.set_defaults(fn=_cmd_bandwidth)

    p = sub.add_parser("ci", help="bootstrap confidence band")
    common(p)
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--pilot", type=float)
    p.add_argument("--bootstrap", type=int, default=1000, metavar="B")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--grid", help="a:b:step")
    p.set_defaults(fn=_cmd_ci)

    p = sub.add_parser("fit", help="parametric interval-censored MLE")
    p.add_argument("--family", choices=["weibull", "lognormal"], required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--truncation", type=float, default=20.0)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=_cmd_fit)

    p = sub.add_parser("quantile", help="quantile of the smoothed MLE")
    common(p, output_required=False)
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--p", type=float, default=0.95)
    p.set_defaults(fn=_cmd_quantile)

    p = sub.add_parser("mean", help="mean of the step MLE")
    common(p, output_required=False)
    p.set_defaults(fn=_cmd_mean)

    p = sub.add_parser("variance", help="asymptotic variance via the adjoint equation")
    p.add_argument("--functional", choices=["mean", "smle"], required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=_cmd_variance)

    p = sub.add_parser("simulate", help="draw a seeded synthetic data set")
    p.add_argument("--config", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("experiment", help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None, help="defaults to the config's 'output' field")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(fn=_cmd_experiment)

    return parser


def _apply_threads(args):
    threads = getattr(args, "threads", None)
    if threads is None:
        return
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=threads)
    except ImportError:
        log.info("threadpoolctl not installed; --threads ignored")


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("SHAPEFIT_LOG", "WARNING").upper())
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_threads(args)
        return args.fn(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError, KeyError) as err:
        print(f"data error: {err}", file=sys.stderr)
        return 2
    except (IcmError, RuntimeError, np.linalg.LinAlgError) as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
