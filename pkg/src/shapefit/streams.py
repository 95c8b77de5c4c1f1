"""Deterministic counter-based random streams.

All randomness in the package flows through Philox generators keyed by
``(seed, *indices)``. Replicates get their own streams, so results do
not depend on execution order and an experiment is reproducible from
its seed alone.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "DATA", "BOOTSTRAP", "PILOT", "BANDWIDTH"]

# Purpose tags keep streams for different uses of the same (seed, index)
# pair disjoint.
DATA = 0x5F01
BOOTSTRAP = 0x5F02
PILOT = 0x5F03
BANDWIDTH = 0x5F04


def _flatten(keys):
    for k in keys:
        if isinstance(k, (tuple, list)):
            yield from _flatten(k)
        else:
            yield int(k)


def stream(*keys) -> np.random.Generator:
    """Counter-based generator for the given (possibly nested) key tuple."""
    flat = tuple(_flatten(keys))
    return np.random.Generator(np.random.Philox(seed=np.random.SeedSequence(flat)))
