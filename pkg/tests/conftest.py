import numpy as np
import pytest

from intrinsic import PriceSeries


def make_series(prices, t0=0, dt=1000):
    prices = np.asarray(prices, dtype=np.float64)
    times = t0 + np.arange(prices.size, dtype=np.int64) * dt
    return PriceSeries(times, prices)


def event_tuples(events):
    """Comparable identity of an event sequence.

    Float equality is exact (prices are positive and finite, so == means
    same bits here).
    """
    return [
        (int(e.kind), int(e.mode), e.time, float(e.price), e.tick_index, e.intrinsic_index)
        for e in events
    ]


def random_walk_series(rng, n=None, sigma=None, start=100.0):
    """A log-normal-step random path for property tests."""
    if n is None:
        n = int(rng.integers(20, 600))
    if sigma is None:
        sigma = float(rng.uniform(0.0005, 0.01))
    steps = rng.standard_normal(n) * sigma
    prices = start * np.exp(np.cumsum(steps))
    times = np.arange(n, dtype=np.int64) * 1000
    return PriceSeries(times, prices, validate=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240915)
