"""Shared domain types and the price-move primitive.

Everything here is an immutable value type with its invariants enforced at
construction; no I/O and no algorithms beyond validation. Timestamps are
integer epoch milliseconds UTC throughout, which keeps event output
bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum

from .errors import DataError

__all__ = [
    "ReturnConvention",
    "Mode",
    "EventKind",
    "SegmentKind",
    "Tick",
    "PricePoint",
    "DissectionConfig",
    "Event",
    "Segment",
    "ScalingFit",
    "Agent",
    "relative_move",
]


class ReturnConvention(Enum):
    """How a move between two prices is expressed as a dimensionless fraction."""

    FRACTIONAL = "fractional"
    LOGARITHMIC = "logarithmic"


class Mode(IntEnum):
    """Direction state of the event detector. UNSET only occurs before the first
    directional change."""

    DOWN = -1
    UNSET = 0
    UP = 1

    @property
    def label(self) -> str:
        return self.name.lower()


class EventKind(IntEnum):
    DIRECTIONAL_CHANGE = 0
    OVERSHOOT = 1

    @property
    def label(self) -> str:
        return "directional_change" if self is EventKind.DIRECTIONAL_CHANGE else "overshoot"


class SegmentKind(IntEnum):
    DIRECTIONAL_CHANGE = 0
    OVERSHOOT = 1

    @property
    def label(self) -> str:
        return "directional_change" if self is SegmentKind.DIRECTIONAL_CHANGE else "overshoot"


def relative_move(
    price_from: float,
    price_to: float,
    convention: ReturnConvention = ReturnConvention.FRACTIONAL,
) -> float:
    """Signed fractional move from ``price_from`` to ``price_to``.

    FRACTIONAL returns ``(to - from) / from``; LOGARITHMIC returns
    ``ln(to / from)``. Both prices must be strictly positive.
    """
    if price_from <= 0.0 or price_to <= 0.0:
        raise DataError(
            f"prices must be positive, got from={price_from!r} to={price_to!r}"
        )
    if convention is ReturnConvention.LOGARITHMIC:
        return math.log(price_to / price_from)
    return (price_to - price_from) / price_from


@dataclass(frozen=True, slots=True)
class Tick:
    """One two-sided quote: epoch-ms time, bid and ask."""

    time: int
    bid: float
    ask: float

    def __post_init__(self):
        if self.bid <= 0.0 or self.ask <= 0.0:
            raise DataError(f"bid/ask must be positive, got {self.bid!r}/{self.ask!r}")
        if self.ask < self.bid:
            raise DataError(f"ask {self.ask!r} below bid {self.bid!r}")


@dataclass(frozen=True, slots=True)
class PricePoint:
    """One single-price sample: epoch-ms time and a positive price."""

    time: int
    price: float

    def __post_init__(self):
        if self.price <= 0.0:
            raise DataError(f"price must be positive, got {self.price!r}")


@dataclass(frozen=True, slots=True)
class DissectionConfig:
    """Threshold and return convention that define one event clock."""

    threshold: float
    return_convention: ReturnConvention = ReturnConvention.FRACTIONAL

    def __post_init__(self):
        if not (0.0 < self.threshold < 1.0):
            raise DataError(
                f"threshold must lie in (0, 1), got {self.threshold!r}"
            )


@dataclass(frozen=True, slots=True)
class Event:
    """A directional-change or overshoot occurrence.

    ``mode`` is the direction in force after the event; ``tick_index`` points
    into the source series; ``intrinsic_index`` is the position on the
    event clock (0-based, increments by one per event).
    """

    kind: EventKind
    mode: Mode
    time: int
    price: float
    tick_index: int
    intrinsic_index: int


@dataclass(frozen=True, slots=True)
class Segment:
    """A price interval between event reference points.

    ``magnitude`` is the absolute move from ``start_price`` to ``end_price``
    under the producing configuration's return convention.
    """

    kind: SegmentKind
    start_price: float
    end_price: float
    start_time: int
    end_time: int
    magnitude: float


@dataclass(frozen=True, slots=True)
class ScalingFit:
    """Estimated power law ``y = (x / C) ** E`` with goodness of fit.

    ``log_intercept`` is the raw intercept of the log-log regression, kept so
    the fit can be re-derived under other parameterizations.
    """

    C: float
    E: float
    r_squared: float
    n_points: int
    log_intercept: float = 0.0

    def __post_init__(self):
        if not self.C > 0.0:
            raise DataError(f"scale constant must be positive, got {self.C!r}")
        if self.n_points < 2:
            raise DataError(f"a fit needs at least 2 points, got {self.n_points}")

    def evaluate(self, x: float) -> float:
        """Value of the fitted law at ``x``."""
        return (x / self.C) ** self.E


@dataclass(frozen=True, slots=True)
class Agent:
    """A position: volume-weighted entry price and signed gearing.

    ``gearing == 0`` means flat, in which case ``entry_price`` is kept at 0
    and carries no meaning.
    """

    entry_price: float = 0.0
    gearing: float = 0.0
    realized_pnl: float = 0.0

    def __post_init__(self):
        if self.entry_price < 0.0:
            raise DataError(f"entry price cannot be negative, got {self.entry_price!r}")
        if self.gearing == 0.0 and self.entry_price != 0.0:
            raise DataError("a flat agent must carry entry_price 0")

    @property
    def is_flat(self) -> bool:
        return self.gearing == 0.0

    def unrealized_pnl(self, mark_price: float) -> float:
        """Mark-to-price pnl of the open position, in price units per unit gearing."""
        if self.gearing == 0.0:
            return 0.0
        return self.gearing * (mark_price - self.entry_price)
