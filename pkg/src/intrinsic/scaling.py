"""Power-law fitting across threshold grids and tail-exponent estimation.

The two event laws relate a dissection quantity to the threshold h:
the event-count law fits N(h) = (h/C)^E over the number of directional
changes (E comes out negative: coarser thresholds see fewer events) and
the overshoot law fits the mean closed-overshoot magnitude, empirically
about h itself (E near 1). Both reduce to ordinary least squares on
(ln x, ln y), which is exact on noiseless power-law input.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import ReturnConvention, ScalingFit
from .dissect import _counts
from .errors import (
    DataError,
    DegenerateExponentError,
    InsufficientEventsError,
    InsufficientTailError,
    UnderdeterminedFitError,
)
from .series import PriceSeries

__all__ = [
    "ThresholdGrid",
    "LawSample",
    "LawFit",
    "TailEstimate",
    "fit_power_law",
    "dc_count_law",
    "overshoot_law",
    "tail_exponent",
    "DEFAULT_MIN_COUNT",
]

# Grid points with fewer directional changes than this are dropped before
# fitting; counting noise dominates below it.
DEFAULT_MIN_COUNT = 10

_DEGENERATE_EXPONENT = 1e-12


@dataclass(frozen=True, slots=True)
class LawSample:
    """One fitted pair: threshold (or abscissa) and the measured quantity."""

    x: float
    y: float

    def __post_init__(self):
        if self.x <= 0.0 or self.y <= 0.0:
            raise DataError(f"law samples must be positive, got ({self.x!r}, {self.y!r})")


class ThresholdGrid:
    """Strictly increasing thresholds, all inside (0, 1)."""

    __slots__ = ("thresholds",)

    def __init__(self, thresholds):
        arr = np.ascontiguousarray(thresholds, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise DataError("a threshold grid needs at least one threshold")
        if not (np.all(arr > 0.0) and np.all(arr < 1.0)):
            raise DataError("thresholds must lie in (0, 1)")
        if arr.size > 1 and not np.all(np.diff(arr) > 0.0):
            raise DataError("thresholds must be strictly increasing")
        self.thresholds = arr

    @classmethod
    def log_spaced(cls, low: float, high: float, count: int) -> "ThresholdGrid":
        if count < 2:
            raise DataError(f"grid needs at least 2 points, got {count}")
        if not (0.0 < low < high < 1.0):
            raise DataError(f"grid bounds must satisfy 0 < low < high < 1, got {low!r}:{high!r}")
        return cls(np.geomspace(low, high, count))

    @classmethod
    def default(cls) -> "ThresholdGrid":
        """Twelve log-spaced thresholds from 0.05% to 5%."""
        return cls.log_spaced(0.0005, 0.05, 12)

    def __len__(self) -> int:
        return self.thresholds.size

    def __iter__(self):
        return iter(float(h) for h in self.thresholds)


@dataclass(frozen=True)
class LawFit:
    """A fitted law plus the raw samples that produced it."""

    law: str
    fit: ScalingFit
    samples: list[LawSample]


@dataclass(frozen=True, slots=True)
class TailEstimate:
    """Estimated tail exponent of a density f(x) ~ x^(-alpha)."""

    alpha: float
    stderr: float
    n_tail: int
    method: str


def _as_samples(samples) -> list[LawSample]:
    out = []
    for s in samples:
        if isinstance(s, LawSample):
            out.append(s)
        else:
            x, y = s
            out.append(LawSample(float(x), float(y)))
    return out


def fit_power_law(samples) -> ScalingFit:
    """Least-squares fit of y = (x/C)^E in log-log space.

    ``samples`` is a sequence of :class:`LawSample` or (x, y) pairs, all
    strictly positive. Samples are sorted before summation, so the result is
    independent of input order down to the last bit. Raises
    :class:`UnderdeterminedFitError` with fewer than two distinct x values and
    :class:`DegenerateExponentError` when the slope is numerically zero (the
    scale constant C is then undefined).
    """
    pts = _as_samples(samples)
    pts.sort(key=lambda s: (s.x, s.y))
    n = len(pts)
    if n < 2 or all(p.x == pts[0].x for p in pts):
        raise UnderdeterminedFitError(
            f"need at least 2 samples with distinct x, got {n}"
        )
    t = np.log([p.x for p in pts])
    u = np.log([p.y for p in pts])
    t_bar = float(np.mean(t))
    u_bar = float(np.mean(u))
    dt = t - t_bar
    du = u - u_bar
    s_tt = float(np.dot(dt, dt))
    slope = float(np.dot(dt, du)) / s_tt
    intercept = u_bar - slope * t_bar
    resid = du - slope * dt
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(du, du))
    if ss_tot > 0.0:
        r_squared = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    else:
        r_squared = 1.0 if ss_res == 0.0 else 0.0
    if abs(slope) < _DEGENERATE_EXPONENT:
        raise DegenerateExponentError(
            f"exponent {slope!r} is numerically zero; scale constant undefined"
        )
    try:
        c = math.exp(-intercept / slope)
    except OverflowError:
        c = math.inf
    if c == 0.0 or math.isinf(c):
        raise DegenerateExponentError(
            "scale constant exp(-intercept/exponent) is not representable"
        )
    return ScalingFit(
        C=c, E=slope, r_squared=r_squared, n_points=n, log_intercept=intercept
    )


def _threshold_stats(series: PriceSeries, grid: ThresholdGrid, convention: ReturnConvention):
    """(n_dc, os_sum, os_count) per grid threshold, computed in parallel.

    Thresholds are independent clocks; the kernel releases the GIL under
    numba, so a thread pool scales across cores. Results are collected in
    grid order, keeping output identical to a sequential run.
    """
    thresholds = list(grid)
    if len(thresholds) == 1:
        state = _counts(series, thresholds[0], convention)
        return [(state[2], state[3], state[4])]
    with ThreadPoolExecutor() as pool:
        states = list(
            pool.map(lambda h: _counts(series, h, convention), thresholds)
        )
    return [(s[2], s[3], s[4]) for s in states]


def dc_count_law(
    series: PriceSeries,
    grid: ThresholdGrid | None = None,
    convention: ReturnConvention = ReturnConvention.FRACTIONAL,
    min_count: int = DEFAULT_MIN_COUNT,
) -> LawFit:
    """Fit the event-count law N(h) = (h/C)^E over a threshold grid.

    Grid points with fewer than ``min_count`` directional changes are
    excluded. Raises :class:`InsufficientEventsError` when fewer than two
    usable points remain.
    """
    grid = grid if grid is not None else ThresholdGrid.default()
    stats = _threshold_stats(series, grid, convention)
    samples = [
        LawSample(h, float(n_dc))
        for h, (n_dc, _, _) in zip(grid, stats)
        if n_dc >= min_count
    ]
    if len(samples) < 2:
        raise InsufficientEventsError(
            f"only {len(samples)} grid point(s) reached {min_count} directional changes"
        )
    return LawFit(law="dc-count", fit=fit_power_law(samples), samples=samples)


def overshoot_law(
    series: PriceSeries,
    grid: ThresholdGrid | None = None,
    convention: ReturnConvention = ReturnConvention.FRACTIONAL,
    min_count: int = DEFAULT_MIN_COUNT,
) -> LawFit:
    """Fit the overshoot law <|os|>(h) = (h/C)^E over a threshold grid.

    For each usable grid point, y is the mean magnitude of the closed
    overshoot segments at that threshold. Points with fewer than
    ``min_count`` directional changes, or with a zero overshoot mean, are
    excluded (the law lives in log space; zero is off its support).
    """
    grid = grid if grid is not None else ThresholdGrid.default()
    stats = _threshold_stats(series, grid, convention)
    samples = []
    for h, (n_dc, os_sum, os_count) in zip(grid, stats):
        if n_dc < min_count or os_count == 0:
            continue
        mean_os = os_sum / os_count
        if mean_os <= 0.0:
            continue
        samples.append(LawSample(h, mean_os))
    if len(samples) < 2:
        raise InsufficientEventsError(
            f"only {len(samples)} usable overshoot grid point(s) at min_count {min_count}"
        )
    return LawFit(law="overshoot", fit=fit_power_law(samples), samples=samples)


def tail_exponent(
    samples,
    x_min: float,
    method: str = "hill",
    min_tail: int = 10,
) -> TailEstimate:
    """Estimate the tail exponent alpha of f(x) ~ x^(-alpha) beyond ``x_min``.

    ``method`` is ``"hill"`` (maximum-likelihood over log excesses:
    ``alpha = 1 + n / sum(ln(x_i / x_min))``, standard error
    ``(alpha - 1)/sqrt(n)``) or ``"ccdf"`` (least-squares slope of the
    log-log empirical CCDF, which estimates ``-(alpha - 1)``). Raises
    :class:`InsufficientTailError` with fewer than ``min_tail`` samples at or
    above ``x_min``.
    """
    if x_min <= 0.0:
        raise DataError(f"x_min must be positive, got {x_min!r}")
    arr = np.ascontiguousarray(samples, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError("samples must be 1-d")
    tail = arr[arr >= x_min]
    n = tail.size
    if n < min_tail:
        raise InsufficientTailError(
            f"only {n} sample(s) at or above x_min={x_min!r}; need {min_tail}"
        )
    if method == "hill":
        log_excess = np.log(tail / x_min)
        total = float(np.sum(log_excess))
        if total <= 0.0:
            raise InsufficientTailError("tail samples have zero spread above x_min")
        alpha = 1.0 + n / total
        stderr = (alpha - 1.0) / math.sqrt(n)
        return TailEstimate(alpha=alpha, stderr=stderr, n_tail=n, method="hill")
    if method == "ccdf":
        order = np.sort(tail)
        # survival at the i-th smallest includes the point itself, so the
        # largest sample keeps a positive value
        ccdf = (n - np.arange(n, dtype=np.float64)) / n
        t = np.log(order)
        u = np.log(ccdf)
        t_bar = float(np.mean(t))
        dt = t - t_bar
        s_tt = float(np.dot(dt, dt))
        if s_tt == 0.0:
            raise InsufficientTailError("tail samples have zero spread above x_min")
        du = u - float(np.mean(u))
        slope = float(np.dot(dt, du)) / s_tt
        resid = du - slope * dt
        dof = max(n - 2, 1)
        slope_se = math.sqrt(float(np.dot(resid, resid)) / dof / s_tt)
        return TailEstimate(alpha=1.0 - slope, stderr=slope_se, n_tail=n, method="ccdf")
    raise DataError(f"unknown tail method {method!r}; use 'hill' or 'ccdf'")
