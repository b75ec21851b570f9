from __future__ import annotations

import numpy as np
import pytest

from infoflow import (
    SimConfig,
    TimeSeries,
    align,
    reference_model,
    simulate,
)

# canonical fixture path: system-1 realization used across test modules
REFERENCE_SEED = 149


@pytest.fixture(scope="session")
def reference_path():
    """One full system-1 path (dt=1e-3, 100000 steps, x0=(1,2), seed 149)."""
    return simulate(SimConfig(reference_model(), (1.0, 2.0), 1e-3, 100_000, REFERENCE_SEED))


def make_pair(x1_values, x2_values, dt=1.0):
    """AlignedPair from raw arrays, for small hand-built cases."""
    return align(
        TimeSeries(np.asarray(x1_values, dtype=float), dt, label="x1"),
        TimeSeries(np.asarray(x2_values, dtype=float), dt, label="x2"),
    )


def random_walk_pair(rng, n=None, dt=0.5):
    """A generic, well-conditioned random pair for property tests."""
    if n is None:
        n = int(rng.integers(16, 64))
    x1 = np.cumsum(rng.standard_normal(n)) + rng.standard_normal(n)
    x2 = np.cumsum(rng.standard_normal(n)) + rng.standard_normal(n)
    return make_pair(x1, x2, dt=dt)
