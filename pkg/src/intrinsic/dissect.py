"""Directional-change / overshoot dissection of price series.

The same state machine is offered two ways: :class:`Runner` consumes points
one at a time (streaming), :func:`dissect` runs the batch kernel over a whole
series. Both emit bit-identical event sequences; the batch path additionally
materializes the segments and the coastline.

Mechanics: before the first directional change the detector measures the move
from the first price of the series, in either direction. Once a mode is
established the reference becomes the running extremum (high in up mode, low
in down mode); a reversal of at least the threshold from it triggers the next
directional change, alternating the mode and resetting all references to the
trigger price. While a mode persists, every fresh threshold-sized advance
from the last event's trigger price emits an overshoot event. All trigger
comparisons are inclusive, so a move of exactly the threshold fires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (
    DissectionConfig,
    Event,
    EventKind,
    Mode,
    PricePoint,
    ReturnConvention,
    Segment,
    SegmentKind,
    relative_move,
)
from .errors import DataError, InsufficientEventsError, TimeRegressionError
from .series import PriceSeries

__all__ = [
    "Runner",
    "Dissection",
    "Coastline",
    "EventSequence",
    "SegmentSequence",
    "dissect",
    "count_dc",
    "avg_overshoot",
    "coastline",
]


_NO_EVENTS: tuple = ()


class Runner:
    """Streaming event detector; feed points in non-decreasing time order.

    Not safe for concurrent stepping; run one Runner per thread. Independent
    runners over the same immutable series need no coordination.
    """

    __slots__ = (
        "config",
        "extremum",
        "extremum_time",
        "last_dc_price",
        "last_dc_time",
        "last_event_price",
        "intrinsic_counter",
        "_mode",
        "_h",
        "_use_log",
        "_seeded",
        "_last_time",
        "_tick",
    )

    def __init__(self, config: DissectionConfig):
        self.config = config
        self.extremum = math.nan
        self.extremum_time = 0
        self.last_dc_price = math.nan
        self.last_dc_time = 0
        self.last_event_price = math.nan
        self.intrinsic_counter = 0
        self._mode = 0
        self._h = config.threshold
        self._use_log = config.return_convention is ReturnConvention.LOGARITHMIC
        self._seeded = False
        self._last_time = -(2**63)
        self._tick = -1

    @property
    def mode(self) -> Mode:
        return Mode(self._mode)

    def step(self, point: PricePoint):
        """Advance by one point; returns the events it triggered (possibly none)."""
        return self.step_raw(point.time, point.price)

    def step_raw(self, time_ms: int, price: float):
        """Same as :meth:`step` from a raw (epoch-ms, price) pair."""
        if price <= 0.0:
            raise DataError(f"price must be positive, got {price!r}")
        if time_ms < self._last_time:
            raise TimeRegressionError(
                f"time decreases: {self._last_time} -> {time_ms}"
            )
        self._last_time = time_ms
        self._tick += 1
        if not self._seeded:
            self.extremum = price
            self.extremum_time = time_ms
            self._seeded = True
            return _NO_EVENTS
        h = self._h
        mode = self._mode
        if mode == 0:
            ref = self.extremum
            if self._use_log:
                m = math.log(price / ref)
            else:
                m = (price - ref) / ref
            if m >= h or m <= -h:
                d = 1 if m > 0.0 else -1
                event = Event(
                    EventKind.DIRECTIONAL_CHANGE,
                    Mode(d),
                    time_ms,
                    price,
                    self._tick,
                    self.intrinsic_counter,
                )
                self.intrinsic_counter += 1
                self._mode = d
                self.extremum = price
                self.extremum_time = time_ms
                self.last_dc_price = price
                self.last_dc_time = time_ms
                self.last_event_price = price
                return (event,)
            return _NO_EVENTS
        extremum = self.extremum
        if mode > 0:
            if price > extremum:
                extremum = self.extremum = price
                self.extremum_time = time_ms
        else:
            if price < extremum:
                extremum = self.extremum = price
                self.extremum_time = time_ms
        use_log = self._use_log
        last_event = self.last_event_price
        if use_log:
            m = math.log(price / last_event)
        else:
            m = (price - last_event) / last_event
        overshoot = None
        if (mode > 0 and m >= h) or (mode < 0 and m <= -h):
            overshoot = Event(
                EventKind.OVERSHOOT,
                Mode(mode),
                time_ms,
                price,
                self._tick,
                self.intrinsic_counter,
            )
            self.intrinsic_counter += 1
            self.last_event_price = price
        if use_log:
            r = math.log(price / extremum)
        else:
            r = (price - extremum) / extremum
        if (mode > 0 and r <= -h) or (mode < 0 and r >= h):
            nm = -mode
            event = Event(
                EventKind.DIRECTIONAL_CHANGE,
                Mode(nm),
                time_ms,
                price,
                self._tick,
                self.intrinsic_counter,
            )
            self.intrinsic_counter += 1
            self._mode = nm
            self.extremum = price
            self.extremum_time = time_ms
            self.last_dc_price = price
            self.last_dc_time = time_ms
            self.last_event_price = price
            if overshoot is not None:
                return (overshoot, event)
            return (event,)
        if overshoot is not None:
            return (overshoot,)
        return _NO_EVENTS


class EventSequence:
    """Read-only sequence view over column-stored events."""

    __slots__ = ("kind", "mode", "time", "price", "tick_index")

    def __init__(self, kind, mode, time, price, tick_index):
        self.kind = kind
        self.mode = mode
        self.time = time
        self.price = price
        self.tick_index = tick_index

    def __len__(self) -> int:
        return self.kind.size

    def __getitem__(self, i: int) -> Event:
        if isinstance(i, slice):
            raise TypeError("slicing events is not supported; index or iterate")
        return Event(
            EventKind(int(self.kind[i])),
            Mode(int(self.mode[i])),
            int(self.time[i]),
            float(self.price[i]),
            int(self.tick_index[i]),
            int(i if i >= 0 else self.kind.size + i),
        )

    def __iter__(self):
        for i in range(self.kind.size):
            yield self[i]


class SegmentSequence:
    """Read-only sequence view over column-stored segments."""

    __slots__ = ("kind", "start_price", "start_time", "end_price", "end_time", "magnitude")

    def __init__(self, kind, start_price, start_time, end_price, end_time, magnitude):
        self.kind = kind
        self.start_price = start_price
        self.start_time = start_time
        self.end_price = end_price
        self.end_time = end_time
        self.magnitude = magnitude

    def __len__(self) -> int:
        return self.kind.size

    def __getitem__(self, i: int) -> Segment:
        if isinstance(i, slice):
            raise TypeError("slicing segments is not supported; index or iterate")
        return Segment(
            SegmentKind(int(self.kind[i])),
            float(self.start_price[i]),
            float(self.end_price[i]),
            int(self.start_time[i]),
            int(self.end_time[i]),
            float(self.magnitude[i]),
        )

    def __iter__(self):
        for i in range(self.kind.size):
            yield self[i]


@dataclass(frozen=True)
class Dissection:
    """Batch dissection output: events, closed segments, trailing overshoot.

    Closed segments alternate directional-change / overshoot kinds, starting
    and ending with a directional-change segment. The stretch from the last
    directional change to the current extremum is not closed yet and is
    reported separately as ``open_overshoot`` (None when no event fired).
    """

    config: DissectionConfig
    events: EventSequence
    segments: SegmentSequence
    open_overshoot: Segment | None

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def n_directional_changes(self) -> int:
        return int(np.count_nonzero(self.events.kind == _kernels.KIND_DC))

    def closed_overshoot_magnitudes(self) -> np.ndarray:
        mask = self.segments.kind == _kernels.KIND_OS
        return self.segments.magnitude[mask]


@dataclass(frozen=True)
class Coastline:
    """Event trigger prices on the intrinsic clock, plus total dissected length."""

    intrinsic_index: np.ndarray
    price: np.ndarray
    total_length: float

    def __len__(self) -> int:
        return self.intrinsic_index.size


def _series_arrays(series: PriceSeries) -> tuple[np.ndarray, np.ndarray]:
    if not isinstance(series, PriceSeries):
        raise TypeError(f"expected PriceSeries, got {type(series).__name__}")
    return series.time, series.price


def dissect(series: PriceSeries, config: DissectionConfig) -> Dissection:
    """Dissect a whole series; equal to folding :class:`Runner` point by point."""
    time_ms, price = _series_arrays(series)
    use_log = config.return_convention is ReturnConvention.LOGARITHMIC
    events, segments, state = _kernels.run_dissection(
        time_ms, price, config.threshold, use_log
    )
    mode = state[5]
    open_seg = None
    if mode != _kernels.MODE_UNSET:
        extremum, extremum_time = state[6], state[7]
        last_dc, last_dc_time = state[8], state[9]
        open_seg = Segment(
            SegmentKind.OVERSHOOT,
            float(last_dc),
            float(extremum),
            int(last_dc_time),
            int(extremum_time),
            abs(relative_move(float(last_dc), float(extremum), config.return_convention)),
        )
    return Dissection(
        config=config,
        events=EventSequence(*events),
        segments=SegmentSequence(*segments),
        open_overshoot=open_seg,
    )


def _counts(series: PriceSeries, threshold: float, convention: ReturnConvention):
    time_ms, price = _series_arrays(series)
    config = DissectionConfig(threshold, convention)
    use_log = config.return_convention is ReturnConvention.LOGARITHMIC
    return _kernels.run_counts(time_ms, price, config.threshold, use_log)


def count_dc(
    series: PriceSeries,
    threshold: float,
    convention: ReturnConvention = ReturnConvention.FRACTIONAL,
) -> int:
    """Number of directional-change events at the given threshold."""
    return int(_counts(series, threshold, convention)[2])


def avg_overshoot(
    series: PriceSeries,
    threshold: float,
    convention: ReturnConvention = ReturnConvention.FRACTIONAL,
) -> float:
    """Mean absolute magnitude of the closed overshoot segments.

    The trailing (open) overshoot is excluded. Raises
    :class:`InsufficientEventsError` when fewer than two directional changes
    occurred, i.e. no overshoot segment ever closed.
    """
    state = _counts(series, threshold, convention)
    os_sum, os_count = state[3], state[4]
    if os_count == 0:
        raise InsufficientEventsError(
            f"no closed overshoot segment at threshold {threshold!r}"
        )
    return os_sum / os_count


def coastline(d: Dissection) -> Coastline:
    """Event-price polyline on the intrinsic clock.

    ``total_length`` sums the magnitudes of all closed segments; since every
    directional-change segment is at least one threshold long, the total is at
    least ``n_directional_changes * threshold``.
    """
    n = len(d.events)
    total = float(np.sum(d.segments.magnitude)) if len(d.segments) else 0.0
    return Coastline(
        intrinsic_index=np.arange(n, dtype=np.int64),
        price=d.events.price.copy(),
        total_length=total,
    )
