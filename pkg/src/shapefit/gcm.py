"""Greatest convex minorant and weighted isotonic regression primitives.

Everything else in the package (step-function MLEs, the self-induced
cusum iteration, the bootstrap loops) reduces to computing left slopes
of a greatest convex minorant, so this module is kept small, strict and
fast: a stack-based pool-adjacent-violators core, compiled with numba
when available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["CusumDiagram", "gcm_slopes", "pava_weighted"]


def _pava_core(values, weights):
    # Stack of blocks: running weighted mean, weight and member count.
    n = values.shape[0]
    mean = np.empty(n)
    wsum = np.empty(n)
    cnt = np.empty(n, np.int64)
    k = -1
    for i in range(n):
        k += 1
        mean[k] = values[i]
        wsum[k] = weights[i]
        cnt[k] = 1
        while k > 0 and mean[k - 1] > mean[k]:
            tot = wsum[k - 1] + wsum[k]
            mean[k - 1] = (wsum[k - 1] * mean[k - 1] + wsum[k] * mean[k]) / tot
            wsum[k - 1] = tot
            cnt[k - 1] += cnt[k]
            k -= 1
    out = np.empty(n)
    pos = 0
    for b in range(k + 1):
        for _ in range(cnt[b]):
            out[pos] = mean[b]
            pos += 1
    return out


def _pava_batch_core(values, weights, out):
    for r in range(values.shape[0]):
        out[r] = _pava_core(values[r], weights)
    return out


try:  # pragma: no cover - exercised implicitly everywhere
    from numba import njit

    _pava_core = njit(cache=True)(_pava_core)
    _pava_batch_core = njit(cache=True)(_pava_batch_core)
except ImportError:  # pragma: no cover
    pass


@dataclass(frozen=True)
class CusumDiagram:
    """Cumulative-sum diagram with an implicit origin at (0, 0).

    ``x`` must be strictly increasing with ``x[0] > 0``; ``y`` holds the
    cumulative ordinates at those abscissas. Tied abscissas must be
    merged by the caller (sum the underlying weights) before building
    the diagram.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if x.size == 0:
            raise ValueError("empty diagram")
        if x[0] <= 0 or np.any(np.diff(x) <= 0):
            raise ValueError("abscissa order: x must be strictly increasing and positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.x.size


def gcm_slopes(diagram: CusumDiagram) -> np.ndarray:
    """Left-continuous slopes of the greatest convex minorant.

    Returns one slope per diagram point: the slope of the minorant
    segment ending at ``x[i]``. The output is nondecreasing, the fitted
    minorant lies below ``y`` and touches it at every slope change.
    """
    dx = np.diff(diagram.x, prepend=0.0)
    dy = np.diff(diagram.y, prepend=0.0)
    return _pava_core(dy / dx, dx)


def pava_weighted(values, weights) -> np.ndarray:
    """Weighted least-squares nondecreasing fit (pool adjacent violators).

    Equivalent to ``gcm_slopes`` on the diagram with ``x`` the cumulative
    weights and ``y`` the cumulative weighted values.
    """
    v = np.ascontiguousarray(values, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if v.ndim != 1 or w.ndim != 1 or v.shape != w.shape:
        raise ValueError("values and weights must be 1-d arrays of equal length")
    if v.size == 0:
        raise ValueError("empty input")
    if np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    return _pava_core(v, w)


def pava_batch(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Row-wise ``pava_weighted`` with one shared weight vector.

    Bootstrap loops refit thousands of isotonic regressions over the
    same abscissas; this avoids the per-call validation overhead.
    """
    v = np.ascontiguousarray(values, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.empty_like(v)
    return _pava_batch_core(v, w, out)
