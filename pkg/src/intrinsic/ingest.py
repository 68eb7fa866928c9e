"""CSV tick/price ingestion, mid-price reduction, and canonical serialization.

Canonical file format: UTF-8 CSV with header ``time,bid,ask`` or
``time,price``; times are ISO-8601 (``Z`` or offset, naive means UTC) or
integer epoch milliseconds. Headerless files are accepted when the first row
already parses: three columns mean time,bid,ask and two mean time,price.
Errors carry 1-based line numbers counted over the physical file. Nothing is
ever interpolated or repaired: weekend gaps pass through, duplicate
timestamps are fine, a time decrease is an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .core import PricePoint, Tick
from .errors import DataError, ParseError, TimeRegressionError
from .series import PriceSeries, TickSeries

__all__ = [
    "TickSource",
    "parse_ticks",
    "parse_price_points",
    "read_price_series",
    "mid_price",
    "to_price_series",
    "filter_spread",
    "write_ticks",
    "write_price_series",
    "format_time_ms",
    "parse_time_field",
]

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_FRACTION = re.compile(r"\.(\d+)")

TICK_COLUMNS = ("time", "bid", "ask")
PRICE_COLUMNS = ("time", "price")


@dataclass(frozen=True)
class TickSource:
    """Where and how to read a series: path (or open text stream) plus delimiter."""

    path: object
    delimiter: str = ","

    def read_text(self) -> str:
        if hasattr(self.path, "read"):
            return self.path.read()
        return Path(self.path).read_text(encoding="utf-8")


def parse_time_field(text: str) -> int:
    """Epoch milliseconds from an integer or ISO-8601 timestamp string.

    Naive ISO timestamps are taken as UTC; sub-millisecond digits are
    truncated.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty time field")
    try:
        return int(s)
    except ValueError:
        pass
    iso = s
    if iso.endswith(("Z", "z")):
        iso = iso[:-1] + "+00:00"
    # normalize fractional seconds to the 6 digits older fromisoformat demands
    iso = _FRACTION.sub(lambda m: "." + m.group(1)[:6].ljust(6, "0"), iso, count=1)
    dt = datetime.fromisoformat(iso)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    delta = dt - _EPOCH
    return delta.days * 86_400_000 + delta.seconds * 1_000 + delta.microseconds // 1_000


def format_time_ms(time_ms: int) -> str:
    """Canonical ISO-8601 form of an epoch-ms timestamp: millisecond precision, Z."""
    seconds, ms = divmod(int(time_ms), 1_000)
    dt = datetime.fromtimestamp(seconds, tz=timezone.utc)
    return f"{dt.strftime('%Y-%m-%dT%H:%M:%S')}.{ms:03d}Z"


def _parse_price_field(text: str, line_number: int, name: str) -> float:
    s = text.strip()
    try:
        value = float(s)
    except ValueError:
        raise ParseError(line_number, f"cannot parse {name} {s!r}") from None
    if not np.isfinite(value):
        raise ParseError(line_number, f"{name} must be finite, got {s!r}")
    return value


def _split_rows(source: TickSource):
    """(layout, rows) for a source; rows are (line_number, fields) pairs.

    The layout comes from the header when present, otherwise from the column
    count of the first data row (3 -> tick, 2 -> price). Blank lines are
    skipped but still counted.
    """
    layout = None
    rows = []
    for line_number, raw in enumerate(source.read_text().splitlines(), start=1):
        if not raw.strip():
            continue
        fields = raw.split(source.delimiter)
        if layout is None and not rows:
            names = tuple(c.strip().lower() for c in fields)
            if names == TICK_COLUMNS or names == PRICE_COLUMNS:
                layout = names
                continue
            try:
                parse_time_field(fields[0])
            except ValueError:
                raise ParseError(
                    line_number,
                    f"unrecognized header {fields!r}; expected "
                    f"{','.join(TICK_COLUMNS)} or {','.join(PRICE_COLUMNS)}",
                ) from None
            if len(fields) == 3:
                layout = TICK_COLUMNS
            elif len(fields) == 2:
                layout = PRICE_COLUMNS
            else:
                raise ParseError(
                    line_number, f"expected 2 or 3 columns, got {len(fields)}"
                )
        rows.append((line_number, fields))
    return layout, rows


def _parse_row_time(line_number: int, field: str) -> int:
    try:
        return parse_time_field(field)
    except ValueError:
        raise ParseError(line_number, f"cannot parse time {field.strip()!r}") from None


def _check_monotone(times: list[int], line_numbers: list[int]) -> None:
    for i in range(1, len(times)):
        if times[i] < times[i - 1]:
            raise TimeRegressionError(
                f"line {line_numbers[i]}: time decreases "
                f"({times[i - 1]} -> {times[i]})"
            )


def _ticks_from_rows(rows, max_rel_spread: float | None) -> TickSeries:
    times: list[int] = []
    bids: list[float] = []
    asks: list[float] = []
    line_numbers: list[int] = []
    for line_number, fields in rows:
        if len(fields) != 3:
            raise ParseError(line_number, f"expected 3 columns, got {len(fields)}")
        t = _parse_row_time(line_number, fields[0])
        bid = _parse_price_field(fields[1], line_number, "bid")
        ask = _parse_price_field(fields[2], line_number, "ask")
        if bid <= 0.0 or ask <= 0.0:
            raise ParseError(line_number, f"prices must be positive, got {bid!r}/{ask!r}")
        if ask < bid:
            raise ParseError(line_number, f"ask {ask!r} below bid {bid!r}")
        times.append(t)
        bids.append(bid)
        asks.append(ask)
        line_numbers.append(line_number)
    _check_monotone(times, line_numbers)
    series = TickSeries(
        np.array(times, dtype=np.int64),
        np.array(bids, dtype=np.float64),
        np.array(asks, dtype=np.float64),
        validate=False,
    )
    if max_rel_spread is not None:
        series = filter_spread(series, max_rel_spread)
    return series


def _prices_from_rows(rows) -> PriceSeries:
    times: list[int] = []
    prices: list[float] = []
    line_numbers: list[int] = []
    for line_number, fields in rows:
        if len(fields) != 2:
            raise ParseError(line_number, f"expected 2 columns, got {len(fields)}")
        t = _parse_row_time(line_number, fields[0])
        price = _parse_price_field(fields[1], line_number, "price")
        if price <= 0.0:
            raise ParseError(line_number, f"price must be positive, got {price!r}")
        times.append(t)
        prices.append(price)
        line_numbers.append(line_number)
    _check_monotone(times, line_numbers)
    return PriceSeries(
        np.array(times, dtype=np.int64),
        np.array(prices, dtype=np.float64),
        validate=False,
    )


def parse_ticks(source: TickSource | str | Path, max_rel_spread: float | None = None) -> TickSeries:
    """Parse a time,bid,ask file into a validated tick series.

    ``max_rel_spread`` optionally drops rows whose relative spread
    ``(ask - bid) / mid`` exceeds the bound (spreads widen hugely over
    no-activity stretches such as weekends). An empty file gives an empty
    series.
    """
    if not isinstance(source, TickSource):
        source = TickSource(source)
    layout, rows = _split_rows(source)
    if layout == PRICE_COLUMNS:
        raise DataError("file has time,price layout; use parse_price_points")
    return _ticks_from_rows(rows, max_rel_spread)


def parse_price_points(source: TickSource | str | Path) -> PriceSeries:
    """Parse a time,price file into a validated price series."""
    if not isinstance(source, TickSource):
        source = TickSource(source)
    layout, rows = _split_rows(source)
    if layout == TICK_COLUMNS:
        raise DataError("file has time,bid,ask layout; use parse_ticks")
    return _prices_from_rows(rows)


def read_price_series(
    source: TickSource | str | Path,
    side: str = "mid",
    max_rel_spread: float | None = None,
) -> PriceSeries:
    """Load either file layout as a price series.

    Tick files are reduced through ``side`` (mid, bid or ask); price files
    are returned as-is (any non-mid ``side`` is then an error).
    """
    if not isinstance(source, TickSource):
        source = TickSource(source)
    layout, rows = _split_rows(source)
    if layout == TICK_COLUMNS:
        return to_price_series(_ticks_from_rows(rows, max_rel_spread), side=side)
    if side != "mid":
        raise DataError(f"price-only file has no {side!r} column")
    return _prices_from_rows(rows)


def mid_price(tick: Tick) -> PricePoint:
    """Mid-price reduction of one tick: ``(bid + ask) / 2``, time preserved."""
    return PricePoint(tick.time, (tick.bid + tick.ask) / 2.0)


def to_price_series(ticks: TickSeries, side: str = "mid") -> PriceSeries:
    """Element-wise price reduction of a tick series; length and order preserved."""
    if side == "mid":
        price = (ticks.bid + ticks.ask) / 2.0
    elif side == "bid":
        price = ticks.bid.copy()
    elif side == "ask":
        price = ticks.ask.copy()
    else:
        raise DataError(f"unknown price side {side!r}; use mid, bid or ask")
    return PriceSeries(ticks.time.copy(), price, validate=False)


def filter_spread(ticks: TickSeries, max_rel_spread: float) -> TickSeries:
    """Drop ticks whose relative spread ``(ask-bid)/mid`` exceeds the bound."""
    if max_rel_spread <= 0.0:
        raise DataError(f"max_rel_spread must be positive, got {max_rel_spread!r}")
    rel = (ticks.ask - ticks.bid) / ticks.mid
    keep = rel <= max_rel_spread
    return TickSeries(ticks.time[keep], ticks.bid[keep], ticks.ask[keep], validate=False)


def write_ticks(ticks: TickSeries, path) -> None:
    """Write the canonical time,bid,ask CSV (ISO-8601 ms times, shortest floats)."""
    lines = ["time,bid,ask"]
    for t, b, a in zip(ticks.time, ticks.bid, ticks.ask):
        lines.append(f"{format_time_ms(int(t))},{float(b)!r},{float(a)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_price_series(series: PriceSeries, path) -> None:
    """Write the canonical time,price CSV (ISO-8601 ms times, shortest floats)."""
    lines = ["time,price"]
    for t, p in zip(series.time, series.price):
        lines.append(f"{format_time_ms(int(t))},{float(p)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
