"""Bootstrap confidence bands for the smoothed estimators.

Current status: Studentized smoothed bootstrap. Observation times stay
fixed; indicators are redrawn from the pilot-smoothed curve, each
replicate is Studentized by its own kernel-weighted variance estimate,
and the band inverts the bootstrap quantiles of that pivot around the
smoothed estimate, scaled by the original-sample variance estimate.

Incubation model: percentile smoothed bootstrap. Exposures and wrapped
times stay fixed; cell indicators are redrawn as multinomials with
pilot-smoothed cell probabilities, and the band uses percentiles of the
deviations of the refitted smoothed estimates from the smoothed pilot.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import streams
from .current_status import (
    CurrentStatusData,
    corrected_ik_weights,
    cs_mle,
    smle_curve,
    smle_eval,
    smooth_convolution,
)
from .gcm import pava_batch
from .incubation import IcmError, IncubationData, inc_mle, reduce_to_interval_censoring
from .kernels import TRIWEIGHT, KernelSpec
from .laws import law_from_config

__all__ = [
    "ConfidenceBand",
    "CoverageConfig",
    "cs_ci_studentized",
    "incubation_ci",
    "coverage_experiment",
]

log = logging.getLogger("shapefit.confidence")

_DEGENERATE_VARIANCE = 1e-30


@dataclass(frozen=True)
class ConfidenceBand:
    """Pointwise band with its generating metadata."""

    grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    estimate: np.ndarray
    alpha: float
    method: str
    B: int
    bandwidth: float
    pilot_bandwidth: float
    skipped: int = 0

    def __post_init__(self):
        if np.any(self.lower > self.upper + 1e-12):
            raise ValueError("lower band limit above upper limit")

    def to_rows(self):
        for t, lo, est, hi in zip(self.grid, self.lower, self.estimate, self.upper):
            yield t, lo, est, hi


def _validate_ci_args(h, h0, B, alpha):
    if h <= 0 or h0 <= 0:
        raise ValueError("bandwidths must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if B < 100:
        raise ValueError("need at least 100 bootstrap replicates")


def cs_ci_studentized(
    data: CurrentStatusData,
    grid,
    h: float,
    h0: float,
    B: int,
    alpha: float,
    seed,
    domain,
    spec: KernelSpec = TRIWEIGHT,
    max_skip_fraction: float = 0.01,
) -> ConfidenceBand:
    """Studentized smoothed-bootstrap band for the current status model.

    Bootstrap entries with a vanishing variance estimate (possible for
    very small samples, where the refitted step MLE can interpolate its
    indicators exactly) are skipped and counted; more than
    ``max_skip_fraction`` of them is an error.
    """
    _validate_ci_args(h, h0, B, alpha)
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    upper = float(domain) if np.isscalar(domain) else float(domain[1])
    srt = data.sorted()
    n = len(srt)
    f_hat = cs_mle(srt)
    pilot_at_obs = smle_eval(f_hat, h0, srt.t, domain, spec)
    estimate = smle_eval(f_hat, h, grid, domain, spec)
    centering = smooth_convolution(f_hat, h0, h, grid, domain, spec)

    k_sq = (spec.kernel((grid[:, None] - srt.t[None, :]) / h) / h) ** 2
    f_hat_at_obs = f_hat.cdf(srt.t)
    s_orig = k_sq @ (srt.delta - f_hat_at_obs) ** 2 / n**2

    atoms, start = np.unique(srt.t, return_index=True)
    counts = np.diff(np.append(start, n)).astype(np.float64)
    weights = counts / n
    delta_star = np.empty((B, n))
    for b in range(B):
        rng = streams.stream(seed, b, streams.BOOTSTRAP)
        delta_star[b] = rng.random(n) < pilot_at_obs
    block_means = np.add.reduceat(delta_star, start, axis=1) / counts
    fstar = np.clip(pava_batch(block_means, weights), 0.0, 1.0)
    np.maximum.accumulate(fstar, axis=1, out=fstar)
    masses = np.diff(fstar, prepend=0.0, axis=1)

    w_grid = corrected_ik_weights(spec, grid, atoms, h, upper)
    at_end = corrected_ik_weights(spec, grid, np.array([upper]), h, upper)
    smle_star = np.clip(masses @ w_grid.T + (1.0 - fstar[:, -1])[:, None] * at_end.T, 0.0, 1.0)

    fstar_at_obs = fstar[:, np.searchsorted(atoms, srt.t)]
    s_star = (delta_star - fstar_at_obs) ** 2 @ k_sq.T / n**2

    # reconstruction noise can leave ~1e-34 crumbs where the variance is
    # exactly zero; anything this small only produces exploding pivots
    bad = s_star <= _DEGENERATE_VARIANCE
    skipped = int(bad.sum())
    if skipped > max_skip_fraction * B * grid.size:
        raise RuntimeError(
            f"{skipped} of {B * grid.size} bootstrap variance estimates vanished"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        pivot = (smle_star - centering[None, :]) / np.sqrt(s_star)
    pivot[bad] = np.nan

    q_lo = np.nanquantile(pivot, alpha / 2.0, axis=0, method="linear")
    q_hi = np.nanquantile(pivot, 1.0 - alpha / 2.0, axis=0, method="linear")
    scale = np.sqrt(s_orig)
    lower = np.clip(estimate - q_hi * scale, 0.0, 1.0)
    upper_band = np.clip(estimate - q_lo * scale, 0.0, 1.0)
    return ConfidenceBand(
        grid=grid,
        lower=lower,
        upper=upper_band,
        estimate=estimate,
        alpha=alpha,
        method="studentized",
        B=B,
        bandwidth=h,
        pilot_bandwidth=h0,
        skipped=skipped,
    )


def _incubation_cells(data: IncubationData, pilot_curve, upper: float):
    """Cell boundaries and pilot cell probabilities for each record.

    Row i holds the cumulative probabilities of landing in cells
    j = 0..m_i, where m_i is the first j with the smoothed CDF equal to
    one at t_i + j e_i; padding repeats the final value 1.
    """
    view = reduce_to_interval_censoring(data)
    n = len(data)
    m_i = np.maximum(np.ceil((upper - view.t) / view.e - 1e-12).astype(np.int64), 0)
    max_m = int(m_i.max())
    j_grid = np.arange(max_m + 1)
    bounds = view.t[:, None] + view.e[:, None] * j_grid[None, :]
    probs = pilot_curve(np.minimum(bounds, upper).ravel()).reshape(n, max_m + 1)
    probs[bounds > upper] = 1.0
    # right-pad each row beyond its own m_i with 1 so padded cells have
    # zero probability
    probs[j_grid[None, :] > m_i[:, None]] = 1.0
    cells = np.diff(probs, prepend=0.0, axis=1)
    negative = int((cells < -1e-12).sum())
    if negative:
        log.warning("clamped %d negative smoothed cell increments", negative)
    cells = np.clip(cells, 0.0, None)
    total = cells.sum(axis=1, keepdims=True)
    if np.any(total < 1.0 - 1e-8):
        log.warning("renormalizing %d defective cell rows", int((total < 1 - 1e-8).sum()))
    cells /= total
    return view, np.cumsum(cells, axis=1)


def _incubation_bootstrap_masses(data, f_hat, h0, B, seed, upper, spec, tol=1e-8):
    """Yield (atoms, masses) of the refitted MLE for each multinomial
    bootstrap replicate; (None, None) for replicates whose refit failed."""
    pilot = smle_curve(f_hat, h0, np.array([0.0]), upper, spec)
    view, cum = _incubation_cells(data, pilot, upper)
    for b in range(B):
        rng = streams.stream(seed, b, streams.BOOTSTRAP)
        u = rng.random(len(data))
        j_star = (u[:, None] > cum).sum(axis=1)
        s_star = view.t + j_star * view.e
        try:
            f_star = inc_mle(IncubationData(view.e, s_star), tol=tol)
        except (IcmError, ValueError) as err:
            log.warning("bootstrap replicate %d failed: %s", b, err)
            yield None, None
            continue
        yield f_star.points, f_star.masses


def incubation_ci(
    data: IncubationData,
    grid,
    h: float,
    h0: float,
    B: int,
    alpha: float,
    seed,
    domain,
    spec: KernelSpec = TRIWEIGHT,
    max_skip_fraction: float = 0.01,
) -> ConfidenceBand:
    """Percentile smoothed-bootstrap band for the incubation model."""
    _validate_ci_args(h, h0, B, alpha)
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    upper = float(domain) if np.isscalar(domain) else float(domain[1])
    f_hat = inc_mle(data)
    estimate = smle_eval(f_hat, h, grid, domain, spec)
    centering = smooth_convolution(f_hat, h0, h, grid, domain, spec)

    deviations = np.empty((B, grid.size))
    failed = 0
    row = 0
    for atoms, masses_b in _incubation_bootstrap_masses(data, f_hat, h0, B, seed, upper, spec):
        if atoms is None:
            failed += 1
            continue
        w = corrected_ik_weights(
            spec, grid, np.minimum(atoms, upper), h, upper
        )
        # pool duplicate clipped atoms implicitly via the linear sum
        smle_star = np.clip(w @ masses_b, 0.0, 1.0)
        deviations[row] = smle_star - centering
        row += 1
    if failed > max_skip_fraction * B:
        raise RuntimeError(f"{failed} of {B} bootstrap refits failed")
    deviations = deviations[:row]

    p_lo = np.quantile(deviations, alpha / 2.0, axis=0, method="linear")
    p_hi = np.quantile(deviations, 1.0 - alpha / 2.0, axis=0, method="linear")
    lower = np.clip(estimate - p_hi, 0.0, 1.0)
    upper_band = np.clip(estimate - p_lo, 0.0, 1.0)
    return ConfidenceBand(
        grid=grid,
        lower=lower,
        upper=upper_band,
        estimate=estimate,
        alpha=alpha,
        method="percentile",
        B=B,
        bandwidth=h,
        pilot_bandwidth=h0,
        skipped=failed,
    )


@dataclass(frozen=True)
class CoverageConfig:
    """Seeded design for the band-coverage experiment."""

    truth: dict = field(default_factory=lambda: {"family": "truncated-exponential", "upper": 2.0})
    observation: dict = field(default_factory=lambda: {"family": "uniform", "a": 0.0, "b": 2.0})
    n: int = 500
    replications: int = 1000
    grid_start: float = 0.02
    grid_stop: float = 1.98
    grid_step: float = 0.02
    bandwidth_c: float = 1.5
    pilot_c0: float = 2.0
    B: int = 500
    alpha: float = 0.05
    seed: int = 1

    @property
    def grid(self) -> np.ndarray:
        count = int(round((self.grid_stop - self.grid_start) / self.grid_step)) + 1
        return self.grid_start + self.grid_step * np.arange(count)


def coverage_experiment(config: CoverageConfig):
    """Per-grid-point non-coverage of the Studentized band.

    Returns ``(grid, noncoverage)`` where the second entry is the
    fraction of replications whose band missed the true CDF value.
    """
    truth = law_from_config(config.truth)
    obs = law_from_config(config.observation)
    domain = truth.support[1]
    grid = config.grid
    truth_vals = truth.cdf(grid)
    h = config.bandwidth_c * config.n ** (-0.2)
    h0 = config.pilot_c0 * config.n ** (-1.0 / 9.0)
    misses = np.zeros(grid.size)
    for r in range(config.replications):
        rng = streams.stream(config.seed, r, streams.DATA)
        x = truth.sample(rng, config.n)
        t = obs.sample(rng, config.n)
        data = CurrentStatusData(t, (x <= t).astype(np.float64))
        band = cs_ci_studentized(
            data, grid, h, h0, config.B, config.alpha, (config.seed, r), domain
        )
        misses += (truth_vals < band.lower - 1e-12) | (truth_vals > band.upper + 1e-12)
    return grid, misses / config.replications
