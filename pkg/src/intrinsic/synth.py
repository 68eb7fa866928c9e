"""Seeded synthetic processes used as oracles for the dissector and fitters.

All randomness comes from numpy's PCG64 generator seeded explicitly; normals
use numpy's ziggurat transform of that stream. Identical specs therefore
produce bit-identical output across runs (and across platforms for a given
numpy build). Timestamps are synthetic, one second apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError
from .series import PriceSeries

__all__ = ["GeneratorKind", "GeneratorSpec", "generate_series", "generate_pareto"]

# 2020-01-01T00:00:00Z
DEFAULT_START_TIME_MS = 1_577_836_800_000
DEFAULT_DT_MS = 1_000

_MAX_WALK_ATTEMPTS = 64


class GeneratorKind(Enum):
    ARITHMETIC_RANDOM_WALK = "arw"
    GEOMETRIC_BROWNIAN_MOTION = "gbm"
    SAWTOOTH = "sawtooth"
    PARETO_SAMPLES = "pareto"


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate and from which seed.

    Per-kind parameters: ``step`` (arithmetic walk, absolute per-step move),
    ``sigma``/``mu`` (geometric Brownian motion, per-step), ``amplitude``
    (sawtooth, fractional swing), ``alpha``/``x_min`` (Pareto samples).
    Unused parameters are ignored.
    """

    kind: GeneratorKind
    n: int
    seed: int
    step: float = 0.01
    sigma: float = 1e-4
    mu: float = 0.0
    amplitude: float = 0.01
    alpha: float = 2.5
    x_min: float = 1.0
    start_price: float = 100.0
    start_time_ms: int = DEFAULT_START_TIME_MS
    dt_ms: int = DEFAULT_DT_MS

    def __post_init__(self):
        if self.n < 0:
            raise DataError(f"n must be non-negative, got {self.n}")
        if self.start_price <= 0.0:
            raise DataError(f"start price must be positive, got {self.start_price!r}")
        if self.dt_ms <= 0:
            raise DataError(f"dt_ms must be positive, got {self.dt_ms}")
        if self.kind is GeneratorKind.ARITHMETIC_RANDOM_WALK and self.step <= 0.0:
            raise DataError(f"step must be positive, got {self.step!r}")
        if self.kind is GeneratorKind.GEOMETRIC_BROWNIAN_MOTION and self.sigma < 0.0:
            raise DataError(f"sigma cannot be negative, got {self.sigma!r}")
        if self.kind is GeneratorKind.SAWTOOTH and not (0.0 < self.amplitude < 1.0):
            raise DataError(f"amplitude must lie in (0, 1), got {self.amplitude!r}")
        if self.kind is GeneratorKind.PARETO_SAMPLES:
            if self.alpha <= 1.0:
                raise DataError(f"alpha must exceed 1, got {self.alpha!r}")
            if self.x_min <= 0.0:
                raise DataError(f"x_min must be positive, got {self.x_min!r}")


def _times(spec: GeneratorSpec) -> np.ndarray:
    return spec.start_time_ms + np.arange(spec.n, dtype=np.int64) * spec.dt_ms


def _gbm_prices(spec: GeneratorSpec) -> np.ndarray:
    prices = np.empty(spec.n, dtype=np.float64)
    if spec.n == 0:
        return prices
    prices[0] = spec.start_price
    if spec.n == 1:
        return prices
    rng = np.random.default_rng(spec.seed)
    z = rng.standard_normal(spec.n - 1)
    growth = np.exp((spec.mu - 0.5 * spec.sigma * spec.sigma) + spec.sigma * z)
    prices[1:] = spec.start_price * np.cumprod(growth)
    return prices


def _random_walk_prices(spec: GeneratorSpec) -> np.ndarray:
    if spec.n == 0:
        return np.empty(0, dtype=np.float64)
    for attempt in range(_MAX_WALK_ATTEMPTS):
        rng = np.random.default_rng((spec.seed, attempt))
        signs = rng.integers(0, 2, spec.n - 1).astype(np.float64) * 2.0 - 1.0
        prices = np.empty(spec.n, dtype=np.float64)
        prices[0] = spec.start_price
        if spec.n > 1:
            prices[1:] = spec.start_price + np.cumsum(signs * spec.step)
        if np.min(prices) > 0.0:
            return prices
    raise DataError(
        "could not generate a positive random-walk path; "
        "start price too close to zero for the given step"
    )


def _nudge_to_move(prev: float, target: float, amplitude: float, direction: int) -> float:
    # Push the target by ulps until the computed fractional move meets the
    # amplitude inclusively; float rounding of prev*(1 +/- a) can otherwise
    # land a hair short of the threshold.
    p = target
    if direction > 0:
        while (p - prev) / prev < amplitude:
            p = np.nextafter(p, np.inf)
    else:
        while (p - prev) / prev > -amplitude:
            p = np.nextafter(p, -np.inf)
    return p


def _sawtooth_prices(spec: GeneratorSpec) -> np.ndarray:
    prices = np.empty(spec.n, dtype=np.float64)
    if spec.n == 0:
        return prices
    p = spec.start_price
    prices[0] = p
    direction = 1
    for i in range(1, spec.n):
        target = p * (1.0 + direction * spec.amplitude)
        p = _nudge_to_move(p, target, spec.amplitude, direction)
        prices[i] = p
        direction = -direction
    return prices


def generate_series(spec: GeneratorSpec) -> PriceSeries:
    """Generate a deterministic synthetic price series.

    Geometric Brownian motion follows
    ``p[t+1] = p[t] * exp(mu - sigma^2/2 + sigma * z[t])`` with standard
    normals ``z``; the arithmetic walk moves ``+-step`` equiprobably,
    regenerating from a derived seed in the rare case a path touches zero;
    the sawtooth alternates exact ``+-amplitude`` fractional moves (nudged by
    ulps so the computed move always meets the amplitude inclusively).
    """
    if spec.kind is GeneratorKind.PARETO_SAMPLES:
        raise DataError("Pareto samples are not a price series; use generate_pareto")
    if spec.kind is GeneratorKind.GEOMETRIC_BROWNIAN_MOTION:
        prices = _gbm_prices(spec)
    elif spec.kind is GeneratorKind.ARITHMETIC_RANDOM_WALK:
        prices = _random_walk_prices(spec)
    elif spec.kind is GeneratorKind.SAWTOOTH:
        prices = _sawtooth_prices(spec)
    else:
        raise DataError(f"unknown generator kind {spec.kind!r}")
    return PriceSeries(_times(spec), prices, validate=False)


def generate_pareto(spec: GeneratorSpec) -> np.ndarray:
    """Draw Pareto-tailed samples by inverse-CDF of the seeded uniform stream.

    Uses ``x = x_min * u ** (-1 / (alpha - 1))`` with ``u`` uniform on (0, 1]
    (the complement of numpy's [0, 1) stream, so the singular endpoint never
    occurs). All samples are >= x_min.
    """
    if spec.kind is not GeneratorKind.PARETO_SAMPLES:
        raise DataError(f"generate_pareto needs kind 'pareto', got {spec.kind.value!r}")
    rng = np.random.default_rng(spec.seed)
    u = 1.0 - rng.random(spec.n)
    return spec.x_min * u ** (-1.0 / (spec.alpha - 1.0))
