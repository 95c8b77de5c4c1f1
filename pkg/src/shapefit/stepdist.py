"""Discrete sub-distribution functions (step CDFs)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["StepDistribution"]

_MASS_TOL = 1e-12


@dataclass(frozen=True)
class StepDistribution:
    """Sorted support points with nonnegative masses, total mass <= 1.

    The CDF is right-continuous, zero strictly below the first point,
    and constant at the total mass above the last point.
    """

    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        m = np.ascontiguousarray(self.masses, dtype=np.float64)
        if pts.ndim != 1 or m.ndim != 1 or pts.shape != m.shape:
            raise ValueError("points and masses must be 1-d arrays of equal length")
        if pts.size and np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly increasing")
        if np.any(m < -_MASS_TOL):
            raise ValueError("masses must be nonnegative")
        m = np.clip(m, 0.0, None)
        if m.sum() > 1.0 + _MASS_TOL:
            raise ValueError(f"total mass {m.sum()} exceeds 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "_cum", np.cumsum(m))

    @classmethod
    def from_cdf_values(cls, points, values) -> "StepDistribution":
        """Build from CDF values at the jump points (first jump from 0)."""
        values = np.asarray(values, dtype=np.float64)
        return cls(points, np.diff(values, prepend=0.0))

    @property
    def total_mass(self) -> float:
        return float(self._cum[-1]) if self.masses.size else 0.0

    def cdf(self, x):
        """Right-continuous CDF, evaluated elementwise."""
        idx = np.searchsorted(self.points, x, side="right")
        cum = np.concatenate(([0.0], self._cum))
        out = cum[idx]
        return float(out) if np.isscalar(x) else out

    def mean(self) -> float:
        return float(np.dot(self.points, self.masses))

    def pruned(self, tol: float = 1e-15) -> "StepDistribution":
        """Drop atoms with mass below ``tol`` (CDF unchanged up to tol)."""
        keep = self.masses > tol
        return StepDistribution(self.points[keep], self.masses[keep])

    def confined(self, upper: float) -> "StepDistribution":
        """Proper distribution on [0, upper]: atoms above ``upper`` and any
        mass deficit are pooled into an atom at ``upper``.

        The smoothed estimators need a total-mass-one input supported in
        their domain; the step MLE is not identified beyond the last
        observation, so the unassigned mass is parked at the endpoint.
        """
        pts = self.points
        inside = pts < upper
        extra = 1.0 - self.masses[inside].sum()
        if extra <= _MASS_TOL:
            return StepDistribution(pts[inside], self.masses[inside] / self.masses[inside].sum())
        return StepDistribution(
            np.concatenate([pts[inside], [upper]]),
            np.concatenate([self.masses[inside], [extra]]),
        )
