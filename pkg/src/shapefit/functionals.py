"""Smooth functionals of the step MLE and their asymptotic variances.

Plug-in quantiles of the smoothed curve, the plug-in mean, the scaling
constant of the local limit law, and dense numerical solutions of the
adjoint integral equation whose solution yields asymptotic variances
for the mean functional and for the smoothed CDF at a point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import quad

from .current_status import SmleCurve
from .kernels import TRIWEIGHT, KernelSpec
from .laws import Degenerate
from .stepdist import StepDistribution

__all__ = [
    "QuantileResult",
    "PhiSolution",
    "VarianceReport",
    "smle_quantile",
    "mean_of_mle",
    "c_e_constant",
    "solve_phi",
    "asymptotic_variance_mean",
    "smle_asymptotic_variance",
]

log = logging.getLogger("shapefit.functionals")


class QuantileResult(NamedTuple):
    value: float
    at_boundary: bool


def smle_quantile(curve: SmleCurve, p: float, tol: float = 1e-10) -> QuantileResult:
    """Invert a monotone smoothed curve at level ``p`` by bisection.

    Raises for non-monotone curves (locally selected bandwidths can
    produce them); returns the boundary with ``at_boundary=True`` when
    ``p`` is outside the range of the curve.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    if not curve.is_monotone:
        raise ValueError("quantile undefined under local bandwidths (curve not monotone)")
    lo, hi = 0.0, curve.upper
    f_lo, f_hi = float(curve(lo)), float(curve(hi))
    if p <= f_lo:
        return QuantileResult(lo, True)
    if p > f_hi:
        return QuantileResult(hi, True)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if float(curve(mid)) < p:
            lo = mid
        else:
            hi = mid
    return QuantileResult(0.5 * (lo + hi), False)


def mean_of_mle(f_hat: StepDistribution) -> float:
    """Plug-in mean of the step MLE; warns when mass is defective."""
    defect = 1.0 - f_hat.total_mass
    if abs(defect) > 1e-8:
        log.warning("mean of a defective distribution (missing mass %.3e)", defect)
    return f_hat.mean()


def _clamped_cdf(F: Callable, upper: float) -> Callable:
    def cdf(x):
        x = np.asarray(x, dtype=np.float64)
        out = np.asarray(F(np.clip(x, 0.0, upper)), dtype=np.float64)
        return np.where(x <= 0.0, 0.0, np.where(x >= upper, 1.0, out))

    return cdf


def c_e_constant(F0: Callable, FE, t0: float, upper: float) -> float:
    """Exposure-averaged inverse window masses at ``t0``.

    Integrates e^(-1) [1/{F0(t0)-F0(t0-e)} + 1/{F0(t0+e)-F0(t0)}]
    against the exposure law, with F0 treated as 0 below 0 and 1 above
    ``upper``. This is the constant scaling the cube-root local limit.
    """
    cdf = _clamped_cdf(F0, upper)
    f_t0 = float(cdf(t0))
    if not 0.0 < f_t0 < 1.0:
        raise ValueError("t0 must be interior: 0 < F0(t0) < 1")

    def integrand(e):
        d_lo = f_t0 - float(cdf(t0 - e))
        d_hi = float(cdf(t0 + e)) - f_t0
        if d_lo <= 0.0 or d_hi <= 0.0:
            raise ValueError("separation condition violated: zero window mass")
        return (1.0 / d_lo + 1.0 / d_hi) / e

    if isinstance(FE, Degenerate):
        return integrand(FE.value)
    lo, hi = FE.support
    if lo <= 0.0:
        raise ValueError("separation condition violated: exposure support touches 0")
    probe = np.linspace(lo, hi, 513)
    for e in probe:
        integrand(float(e))
    val, err = quad(lambda e: integrand(e) * float(FE.pdf(e)), lo, hi, epsabs=1e-10, limit=200)
    if err > 1e-8:
        raise RuntimeError(f"quadrature error estimate {err} too large")
    return float(val)


@dataclass(frozen=True)
class PhiSolution:
    """Discrete solution of the adjoint equation, zero at both endpoints."""

    grid: np.ndarray
    values: np.ndarray
    residual: float

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.grid))


@dataclass(frozen=True)
class VarianceReport:
    sigma2: float
    grid_size: int
    refinement_delta: float
    residual: float


def _exposure_quadrature(FE, e_nodes: int):
    if isinstance(FE, Degenerate):
        if FE.value <= 0.0:
            raise ValueError("separation condition violated: degenerate exposure at 0")
        return np.array([FE.value]), np.array([1.0])
    lo, hi = FE.support
    if lo <= 0.0:
        raise ValueError("separation condition violated: exposure support touches 0")
    nodes = np.linspace(lo, hi, e_nodes)
    w = np.full(e_nodes, (hi - lo) / (e_nodes - 1))
    w[0] *= 0.5
    w[-1] *= 0.5
    return nodes, w * FE.pdf(nodes)


def solve_phi(
    F: Callable,
    FE,
    rhs,
    grid_size: int,
    upper: float,
    e_nodes: int = 200,
) -> PhiSolution:
    """Solve the adjoint integral equation on a uniform grid over [0, upper].

    The unknown is pinned to zero at and beyond both endpoints. The
    exposure integral uses trapezoid quadrature against the exposure
    density; off-grid values of the unknown are linearly interpolated.
    ``rhs`` is a callable or an array over the interior grid points.
    """
    if grid_size < 4:
        raise ValueError("grid_size too small")
    cdf = _clamped_cdf(F, upper)
    grid = np.linspace(0.0, upper, grid_size + 1)
    interior = grid[1:-1]
    n_unknown = interior.size
    e_vals, e_weights = _exposure_quadrature(FE, e_nodes)

    if callable(rhs):
        b = np.asarray([float(rhs(v)) for v in interior])
    else:
        b = np.asarray(rhs, dtype=np.float64)
        if b.shape != (n_unknown,):
            raise ValueError(f"rhs must have length {n_unknown}")

    f_interior = cdf(interior)
    A = np.zeros((n_unknown, n_unknown))
    spacing = upper / grid_size

    def scatter(rows, positions, coef):
        """Add coef * linear-interpolation(phi at positions) to A rows."""
        inside = (positions > 0.0) & (positions < upper)
        if not inside.any():
            return
        rows, positions, coef = rows[inside], positions[inside], coef[inside]
        k = np.minimum((positions / spacing).astype(np.int64), grid_size - 1)
        theta = positions / spacing - k
        for idx, wgt in ((k - 1, coef * (1.0 - theta)), (k, coef * theta)):
            valid = (idx >= 0) & (idx < n_unknown)
            np.add.at(A, (rows[valid], idx[valid]), wgt[valid])

    rows = np.arange(n_unknown)
    for e, ew in zip(e_vals, e_weights):
        d_plus = cdf(interior + e) - f_interior
        d_minus = f_interior - cdf(interior - e)
        if np.any(d_plus <= 1e-14) or np.any(d_minus <= 1e-14):
            raise ValueError("separation condition violated: vanishing window mass")
        scale = ew / e
        A[rows, rows] -= scale * (1.0 / d_plus + 1.0 / d_minus)
        scatter(rows, interior + e, scale / d_plus)
        scatter(rows, interior - e, scale / d_minus)

    try:
        phi_interior = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as err:
        raise RuntimeError(
            f"singular discretized operator (cond ~ {np.linalg.cond(A):.3e})"
        ) from err
    residual = float(np.max(np.abs(A @ phi_interior - b)))
    rhs_scale = max(float(np.max(np.abs(b))), 1e-30)
    if residual > 1e-6 * rhs_scale:
        raise RuntimeError(f"operator residual {residual} exceeds 1e-6 * sup|rhs|")
    values = np.concatenate(([0.0], phi_interior, [0.0]))
    return PhiSolution(grid=grid, values=values, residual=residual)


def asymptotic_variance_mean(F, FE, grid_size: int, upper: float, e_nodes: int = 200) -> VarianceReport:
    """Asymptotic variance of the plug-in mean: minus the integral of the
    adjoint solution with unit right-hand side, with a grid-doubling
    refinement delta."""
    coarse = solve_phi(F, FE, lambda v: 1.0, grid_size, upper, e_nodes)
    fine = solve_phi(F, FE, lambda v: 1.0, 2 * grid_size, upper, e_nodes)
    sigma2 = -coarse.integral()
    sigma2_fine = -fine.integral()
    if sigma2 <= 0.0:
        raise RuntimeError(f"nonpositive variance {sigma2}")
    delta = abs(sigma2_fine - sigma2) / abs(sigma2_fine)
    return VarianceReport(
        sigma2=sigma2, grid_size=grid_size, refinement_delta=delta, residual=coarse.residual
    )


def smle_asymptotic_variance(
    F,
    FE,
    t: float,
    h: float,
    n: int,
    grid_size: int,
    upper: float,
    spec: KernelSpec = TRIWEIGHT,
    e_nodes: int = 200,
) -> float:
    """Asymptotic variance of the smoothed CDF at an interior point.

    Solves the adjoint equation with the negated kernel as right-hand
    side and integrates the solution against the kernel, scaled by
    n^(-1/5).
    """
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    if t - h <= 0.0 or t + h >= upper:
        raise ValueError("kernel support must lie inside (0, upper)")

    def rhs(v):
        return -float(spec.kernel((t - v) / h)) / h

    sol = solve_phi(F, FE, rhs, grid_size, upper, e_nodes)
    kernel_vals = spec.kernel((t - sol.grid) / h) / h
    sigma2 = n ** (-0.2) * float(np.trapezoid(sol.values * kernel_vals, sol.grid))
    if sigma2 <= 0.0:
        raise RuntimeError(f"nonpositive variance {sigma2}")
    return sigma2
