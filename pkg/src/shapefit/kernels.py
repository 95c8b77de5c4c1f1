"""Smoothing kernels on [-1, 1] and their integrated / derivative forms.

The default is the triweight kernel: it has a closed-form integrated
kernel and two continuous derivatives everywhere, which the pilot
second-derivative estimator needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["KernelSpec", "TRIWEIGHT", "kernel_eval"]


def _tri_k(u):
    u = np.asarray(u, dtype=np.float64)
    inside = np.abs(u) < 1.0
    return np.where(inside, (35.0 / 32.0) * (1.0 - u * u) ** 3, 0.0)


def _tri_ik(u):
    u = np.asarray(u, dtype=np.float64)
    uc = np.clip(u, -1.0, 1.0)
    u2 = uc * uc
    poly = uc * (1.0 - u2 + 0.6 * u2 * u2 - u2 * u2 * u2 / 7.0)
    return (35.0 / 32.0) * poly + 0.5


def _tri_dk(u):
    u = np.asarray(u, dtype=np.float64)
    inside = np.abs(u) < 1.0
    return np.where(inside, -(105.0 / 16.0) * u * (1.0 - u * u) ** 2, 0.0)


@dataclass(frozen=True)
class KernelSpec:
    """Closed-form kernel K, integrated kernel IK and derivative K'.

    K is symmetric, nonnegative, integrates to one on [-1, 1];
    IK(-1) = 0, IK(0) = 1/2, IK(1) = 1.
    """

    kernel: Callable
    integrated: Callable
    derivative: Callable
    second_moment: float
    squared_norm: float


TRIWEIGHT = KernelSpec(
    kernel=_tri_k,
    integrated=_tri_ik,
    derivative=_tri_dk,
    second_moment=1.0 / 9.0,
    squared_norm=350.0 / 429.0,
)


def kernel_eval(spec: KernelSpec, u):
    """Return ``(K(u), IK(u))``; K vanishes and IK is clamped outside [-1, 1]."""
    return spec.kernel(u), spec.integrated(u)
