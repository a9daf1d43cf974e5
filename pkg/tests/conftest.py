"""Shared helpers for the test suite.

All randomness goes through Philox keyed by an explicit seed so every test
is reproducible; hypothesis runs derandomized with a small example budget.
"""

import numpy as np
from hypothesis import HealthCheck, settings

from gowers import CyclicFn, EdgeFn

settings.register_profile(
    "suite",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def random_cyclic(n: int, seed: int, low: float = 0.0, high: float = 1.0) -> CyclicFn:
    rng = philox(seed)
    return CyclicFn(n, low + (high - low) * rng.random(n))


def random_edge_fn(
    edge: tuple[int, ...],
    dims: tuple[int, ...],
    seed: int,
    low: float = -1.0,
    high: float = 1.0,
) -> EdgeFn:
    rng = philox(seed)
    return EdgeFn(edge, dims, low + (high - low) * rng.random(dims))
