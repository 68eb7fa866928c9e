"""Array-backed containers for tick and price series.

Series are stored as contiguous numpy columns (int64 epoch-ms times, float64
prices) and validated once at construction: positive prices, ask >= bid, and
non-decreasing time. Indexing returns the scalar value types from
:mod:`intrinsic.core`.
"""

from __future__ import annotations

import numpy as np

from .core import PricePoint, Tick
from .errors import DataError, TimeRegressionError

__all__ = ["PriceSeries", "TickSeries"]


def _as_time(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.int64)
    if arr.ndim != 1:
        raise DataError(f"time column must be 1-d, got shape {arr.shape}")
    return arr


def _as_price(values, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"{name} column must be 1-d, got shape {arr.shape}")
    return arr


def _check_time_monotone(time: np.ndarray) -> None:
    if time.size < 2:
        return
    deltas = np.diff(time)
    bad = np.nonzero(deltas < 0)[0]
    if bad.size:
        i = int(bad[0])
        raise TimeRegressionError(
            f"time decreases at index {i + 1}: {time[i]} -> {time[i + 1]}"
        )


def _check_positive(values: np.ndarray, name: str) -> None:
    bad = np.nonzero(~(values > 0.0))[0]
    if bad.size:
        i = int(bad[0])
        raise DataError(f"{name} must be positive, got {values[i]!r} at index {i}")


class PriceSeries:
    """A time-ordered single-price sample backed by numpy columns."""

    __slots__ = ("time", "price")

    def __init__(self, time, price, validate: bool = True):
        self.time = _as_time(time)
        self.price = _as_price(price, "price")
        if self.time.shape != self.price.shape:
            raise DataError(
                f"time and price lengths differ: {self.time.size} vs {self.price.size}"
            )
        if validate:
            _check_positive(self.price, "price")
            _check_time_monotone(self.time)

    def __len__(self) -> int:
        return self.time.size

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return PriceSeries(self.time[idx], self.price[idx], validate=False)
        return PricePoint(int(self.time[idx]), float(self.price[idx]))

    def __iter__(self):
        for t, p in zip(self.time, self.price):
            yield PricePoint(int(t), float(p))

    def __repr__(self) -> str:
        return f"PriceSeries(n={len(self)})"

    def equals(self, other: "PriceSeries") -> bool:
        """Bitwise equality of both columns."""
        return np.array_equal(self.time, other.time) and np.array_equal(
            self.price, other.price
        )


class TickSeries:
    """A time-ordered two-sided quote sample backed by numpy columns."""

    __slots__ = ("time", "bid", "ask")

    def __init__(self, time, bid, ask, validate: bool = True):
        self.time = _as_time(time)
        self.bid = _as_price(bid, "bid")
        self.ask = _as_price(ask, "ask")
        if not (self.time.shape == self.bid.shape == self.ask.shape):
            raise DataError("time, bid and ask lengths differ")
        if validate:
            _check_positive(self.bid, "bid")
            _check_positive(self.ask, "ask")
            bad = np.nonzero(self.ask < self.bid)[0]
            if bad.size:
                i = int(bad[0])
                raise DataError(
                    f"ask below bid at index {i}: {self.ask[i]!r} < {self.bid[i]!r}"
                )
            _check_time_monotone(self.time)

    def __len__(self) -> int:
        return self.time.size

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return TickSeries(self.time[idx], self.bid[idx], self.ask[idx], validate=False)
        return Tick(int(self.time[idx]), float(self.bid[idx]), float(self.ask[idx]))

    def __iter__(self):
        for t, b, a in zip(self.time, self.bid, self.ask):
            yield Tick(int(t), float(b), float(a))

    def __repr__(self) -> str:
        return f"TickSeries(n={len(self)})"

    @property
    def mid(self) -> np.ndarray:
        """Element-wise mid price ``(bid + ask) / 2``."""
        return (self.bid + self.ask) / 2.0

    def equals(self, other: "TickSeries") -> bool:
        return (
            np.array_equal(self.time, other.time)
            and np.array_equal(self.bid, other.bid)
            and np.array_equal(self.ask, other.ask)
        )
