"""Parametric laws used as simulation truths and exposure distributions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

__all__ = [
    "TruncatedExponential",
    "TruncatedWeibull",
    "Uniform",
    "Degenerate",
    "LogNormal",
    "law_from_config",
]


@dataclass(frozen=True)
class TruncatedExponential:
    """Standard exponential truncated to [0, upper]."""

    upper: float = 2.0

    @property
    def support(self):
        return (0.0, self.upper)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        z = 1.0 - math.exp(-self.upper)
        return np.clip(-np.expm1(-np.clip(x, 0.0, self.upper)) / z, 0.0, 1.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        z = 1.0 - math.exp(-self.upper)
        return np.where((x >= 0) & (x <= self.upper), np.exp(-x) / z, 0.0)

    def ppf(self, p):
        p = np.asarray(p, dtype=np.float64)
        z = 1.0 - math.exp(-self.upper)
        return -np.log1p(-p * z)

    def sample(self, rng, size):
        return self.ppf(rng.random(size))

    def mean(self) -> float:
        z = 1.0 - math.exp(-self.upper)
        return 1.0 - self.upper * math.exp(-self.upper) / z


@dataclass(frozen=True)
class TruncatedWeibull:
    """Weibull with shape ``alpha`` and rate-like scale ``beta``, truncated
    to [0, upper]: F(x) = (1 - exp(-beta x^alpha)) / (1 - exp(-beta upper^alpha)).
    """

    alpha: float = 3.03514
    beta: float = 0.002619
    upper: float = 20.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0 or self.upper <= 0:
            raise ValueError("alpha, beta and upper must be positive")

    @property
    def support(self):
        return (0.0, self.upper)

    def _norm(self) -> float:
        return -math.expm1(-self.beta * self.upper**self.alpha)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        xc = np.clip(x, 0.0, self.upper)
        val = -np.expm1(-self.beta * xc**self.alpha) / self._norm()
        return np.where(x > self.upper, 1.0, np.where(x < 0, 0.0, np.minimum(val, 1.0)))

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        inside = (x > 0) & (x <= self.upper)
        xs = np.where(inside, x, 1.0)
        dens = self.alpha * self.beta * xs ** (self.alpha - 1.0) * np.exp(-self.beta * xs**self.alpha)
        return np.where(inside, dens / self._norm(), 0.0)

    def ppf(self, p):
        p = np.asarray(p, dtype=np.float64)
        return (-np.log1p(-p * self._norm()) / self.beta) ** (1.0 / self.alpha)

    def sample(self, rng, size):
        return self.ppf(rng.random(size))

    def mean(self) -> float:
        # tail-integral form; the integrand is smooth on [0, upper]
        from scipy.integrate import quad

        val, _ = quad(lambda x: 1.0 - float(self.cdf(x)), 0.0, self.upper, limit=200)
        return val


@dataclass(frozen=True)
class Uniform:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.upper > self.lower:
            raise ValueError("upper must exceed lower")

    @property
    def support(self):
        return (self.lower, self.upper)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.clip((x - self.lower) / (self.upper - self.lower), 0.0, 1.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        inside = (x >= self.lower) & (x <= self.upper)
        return np.where(inside, 1.0 / (self.upper - self.lower), 0.0)

    def ppf(self, p):
        return self.lower + np.asarray(p, dtype=np.float64) * (self.upper - self.lower)

    def sample(self, rng, size):
        return rng.uniform(self.lower, self.upper, size)

    def mean(self) -> float:
        return 0.5 * (self.lower + self.upper)


@dataclass(frozen=True)
class Degenerate:
    """Point mass; useful as a degenerate exposure law."""

    value: float

    @property
    def support(self):
        return (self.value, self.value)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x >= self.value, 1.0, 0.0)

    def ppf(self, p):
        return np.full_like(np.asarray(p, dtype=np.float64), self.value)

    def sample(self, rng, size):
        return np.full(size, self.value)

    def mean(self) -> float:
        return self.value


@dataclass(frozen=True)
class LogNormal:
    """Plain log-normal with log-mean ``alpha`` and log-sd ``beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    @property
    def support(self):
        return (0.0, math.inf)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        safe = np.where(x > 0, x, 1.0)
        return np.where(x > 0, ndtr((np.log(safe) - self.alpha) / self.beta), 0.0)

    def ppf(self, p):
        from scipy.special import ndtri

        return np.exp(self.alpha + self.beta * ndtri(np.asarray(p, dtype=np.float64)))

    def sample(self, rng, size):
        return np.exp(self.alpha + self.beta * rng.standard_normal(size))

    def mean(self) -> float:
        return math.exp(self.alpha + 0.5 * self.beta**2)


_FAMILIES = {
    "truncated-exponential": lambda p: TruncatedExponential(upper=p.get("upper", 2.0)),
    "truncated-weibull": lambda p: TruncatedWeibull(
        alpha=p.get("alpha", 3.03514), beta=p.get("beta", 0.002619), upper=p.get("upper", 20.0)
    ),
    "uniform": lambda p: Uniform(lower=p.get("a", p.get("lower", 0.0)), upper=p.get("b", p.get("upper", 1.0))),
    "degenerate": lambda p: Degenerate(value=p["value"]),
    "log-normal": lambda p: LogNormal(alpha=p["alpha"], beta=p["beta"]),
}


def law_from_config(cfg: dict):
    """Build a law from a ``{"family": ..., <parameters>}`` mapping."""
    try:
        family = cfg["family"]
    except (KeyError, TypeError):
        raise ValueError("law config must be a mapping with a 'family' key") from None
    try:
        builder = _FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown law family {family!r}; known: {sorted(_FAMILIES)}") from None
    return builder(cfg)
