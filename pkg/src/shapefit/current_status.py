"""Current status model: step MLE and boundary-corrected smoothed MLE.

Data are pairs (t, delta) with delta = 1 when the hidden event happened
by the inspection time t. The MLE is the left-slope vector of the
greatest convex minorant of the cusum diagram of sorted indicators; the
smoothed estimator convolves the step MLE with an integrated kernel,
reflected at both endpoints of the domain so that it is exactly 0 at 0
and 1 at the right endpoint.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gcm import CusumDiagram, gcm_slopes
from .kernels import TRIWEIGHT, KernelSpec
from .stepdist import StepDistribution

__all__ = [
    "CurrentStatusData",
    "SmleCurve",
    "cs_mle",
    "smle_eval",
    "smle_curve",
    "corrected_ik_weights",
    "reflected_density",
    "smooth_convolution",
    "load_current_status_csv",
]


@dataclass(frozen=True)
class CurrentStatusData:
    """Observation times and censoring indicators."""

    t: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(self.t, dtype=np.float64)
        d = np.ascontiguousarray(self.delta, dtype=np.float64)
        if t.ndim != 1 or d.ndim != 1 or t.shape != d.shape:
            raise ValueError("t and delta must be 1-d arrays of equal length")
        if t.size == 0:
            raise ValueError("empty data")
        if not np.all(np.isfinite(t)) or np.any(t <= 0):
            raise ValueError("observation times must be finite and positive")
        if not np.all((d == 0) | (d == 1)):
            raise ValueError("delta must be 0 or 1")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "delta", d)

    def __len__(self):
        return self.t.size

    def sorted(self) -> "CurrentStatusData":
        order = np.argsort(self.t, kind="stable")
        return CurrentStatusData(self.t[order], self.delta[order])


def cs_mle(data: CurrentStatusData) -> StepDistribution:
    """Nonparametric MLE of the event-time distribution.

    Ties in t are pooled into a single cusum point, which preserves the
    likelihood. Returns a step CDF supported on the distinct sorted
    observation times, with values in [0, 1].
    """
    srt = data.sorted()
    pts, start = np.unique(srt.t, return_index=True)
    counts = np.diff(np.append(start, len(srt)))
    dsum = np.add.reduceat(srt.delta, start)
    n = float(len(srt))
    diagram = CusumDiagram(np.cumsum(counts) / n, np.cumsum(dsum) / n)
    values = np.clip(gcm_slopes(diagram), 0.0, 1.0)
    np.maximum.accumulate(values, out=values)
    return StepDistribution.from_cdf_values(pts, values)


def corrected_ik_weights(spec: KernelSpec, t, x, h: float, upper: float) -> np.ndarray:
    """Reflected integrated-kernel weights, shape ``t.shape + x.shape``.

    For an atom at x, the weight at t is the mass of the kernel placed
    at x (and its reflections about 0 and ``upper``) lying in [0, t].
    Interior points reduce to plain IK((t - x)/h); at t = 0 the weight
    is exactly 0 and at t = upper exactly 1.
    """
    t = np.asarray(t, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    tt = t[..., None] if x.ndim else t
    ik = spec.integrated
    return ik((tt - x) / h) + ik((tt + x) / h) + ik((tt + x - 2.0 * upper) / h) - 1.0


def reflected_density(spec: KernelSpec, u, x, h: float, upper: float) -> np.ndarray:
    """Density of the boundary-corrected smoother, shape ``u.shape + x.shape``."""
    u = np.asarray(u, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    uu = u[..., None] if x.ndim else u
    k = spec.kernel
    return (k((uu - x) / h) + k((uu + x) / h) + k((uu + x - 2.0 * upper) / h)) / h


def smle_eval(f_hat: StepDistribution, h: float, t, domain, spec: KernelSpec = TRIWEIGHT):
    """Smoothed MLE at ``t``: kernel-smoothed step CDF on ``domain`` = (0, M).

    Mass at or above M (and any mass deficit) is treated as an atom at
    M, so the result is a proper CDF on [0, M]: exactly 0 at t = 0 and 1
    at t = M. Values are clamped to [0, 1] against roundoff.
    """
    lo, upper = _check_domain(h, domain)
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < lo - 1e-12) or np.any(t_arr > upper + 1e-12):
        raise ValueError(f"evaluation point outside [0, {upper}]")
    dist = f_hat.confined(upper)
    w = corrected_ik_weights(spec, t_arr, dist.points, h, upper)
    vals = np.clip(w @ dist.masses, 0.0, 1.0)
    # exact in exact arithmetic; pin against the ~1 ulp mass-sum error
    vals = np.where(t_arr <= lo, 0.0, np.where(t_arr >= upper, 1.0, vals))
    return float(vals) if np.isscalar(t) else vals


def _check_domain(h, domain):
    lo, upper = (0.0, float(domain)) if np.isscalar(domain) else (float(domain[0]), float(domain[1]))
    if lo != 0.0:
        raise ValueError("domain must start at 0")
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    if h > upper:
        raise ValueError("bandwidth exceeds the domain length")
    return lo, upper


@dataclass(frozen=True)
class SmleCurve:
    """Smoothed MLE evaluated on a grid, with its generating pieces kept
    around so the curve can be queried off-grid (quantile inversion)."""

    grid: np.ndarray
    values: np.ndarray
    bandwidth: float
    upper: float
    dist: StepDistribution
    spec: KernelSpec = TRIWEIGHT

    def __call__(self, t):
        return smle_eval(self.dist, self.bandwidth, t, self.upper, self.spec)

    @property
    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.values) >= -1e-12))


def smle_curve(f_hat: StepDistribution, h: float, grid, domain, spec: KernelSpec = TRIWEIGHT) -> SmleCurve:
    _, upper = _check_domain(h, domain)
    grid = np.asarray(grid, dtype=np.float64)
    dist = f_hat.confined(upper)
    values = smle_eval(dist, h, grid, domain, spec)
    return SmleCurve(grid=grid, values=values, bandwidth=h, upper=upper, dist=dist, spec=spec)


@lru_cache(maxsize=64)
def _gauss_panels(upper: float, n_panels: int, order: int = 12):
    base, bw = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, upper, n_panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * base[None, :]).ravel()
    weights = (half[:, None] * bw[None, :]).ravel()
    return nodes, weights


def smooth_convolution(
    f_hat: StepDistribution, h0: float, h: float, t, domain, spec: KernelSpec = TRIWEIGHT
):
    """Integrated kernel at bandwidth ``h`` convolved with the smoothed
    (pilot bandwidth ``h0``) measure: the bootstrap centering term.

    Both smoothing levels use the reflected boundary form, so away from
    the boundary this is the plain double convolution. Composite
    Gauss-Legendre panels no wider than half the smaller bandwidth keep
    the quadrature error negligible next to the statistical scales.
    """
    _, upper = _check_domain(h, domain)
    if h0 <= 0:
        raise ValueError("pilot bandwidth must be positive")
    t_arr = np.asarray(t, dtype=np.float64)
    dist = f_hat.confined(upper)
    n_panels = int(np.ceil(4.0 * upper / min(h, h0)))
    nodes, weights = _gauss_panels(upper, n_panels)
    dens = reflected_density(spec, nodes, dist.points, h0, upper) @ dist.masses
    w_outer = corrected_ik_weights(spec, t_arr, nodes, h, upper)
    vals = w_outer @ (weights * dens)
    return float(vals) if np.isscalar(t) else vals


def load_current_status_csv(path) -> CurrentStatusData:
    """Read ``t,delta`` records; raises ValueError naming the bad row."""
    t, d = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:2]] != ["t", "delta"]:
            raise ValueError(f"{path}: expected header 't,delta'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                t.append(float(row[0]))
                delta = float(row[1])
                if delta not in (0.0, 1.0):
                    raise ValueError
                d.append(delta)
            except (ValueError, IndexError):
                raise ValueError(f"{path}: malformed row {lineno}: {row!r}") from None
    return CurrentStatusData(np.array(t), np.array(d))
