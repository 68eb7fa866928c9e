"""Event-based dissection of price series.

Price curves are reduced to directional-change and overshoot events on an
intrinsic clock that ticks only when the market moves by a chosen threshold.
On top of the event stream the package measures coastlines, fits the
event-count and overshoot scaling laws across threshold grids, estimates
power-law tail exponents, generates seeded synthetic processes for
verification, and runs a minimal event-driven agent.
"""

from ._kernels import USING_NUMBA
from .agent import AgentRules, AgentTrajectory, DirectionPolicy, Fill, on_event, run_strategy
from .core import (
    Agent,
    DissectionConfig,
    Event,
    EventKind,
    Mode,
    PricePoint,
    ReturnConvention,
    ScalingFit,
    Segment,
    SegmentKind,
    Tick,
    relative_move,
)
from .dissect import (
    Coastline,
    Dissection,
    Runner,
    avg_overshoot,
    coastline,
    count_dc,
    dissect,
)
from .errors import (
    DataError,
    DegenerateExponentError,
    EstimationError,
    InsufficientEventsError,
    InsufficientTailError,
    IntrinsicError,
    ParseError,
    TimeRegressionError,
    UnderdeterminedFitError,
)
from .ingest import (
    TickSource,
    mid_price,
    parse_price_points,
    parse_ticks,
    read_price_series,
    to_price_series,
    write_price_series,
    write_ticks,
)
from .scaling import (
    LawFit,
    LawSample,
    TailEstimate,
    ThresholdGrid,
    dc_count_law,
    fit_power_law,
    overshoot_law,
    tail_exponent,
)
from .series import PriceSeries, TickSeries
from .synth import GeneratorKind, GeneratorSpec, generate_pareto, generate_series

__version__ = "0.1.0"

__all__ = [
    "USING_NUMBA",
    "__version__",
    # core
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
    # errors
    "IntrinsicError",
    "DataError",
    "ParseError",
    "TimeRegressionError",
    "EstimationError",
    "InsufficientEventsError",
    "InsufficientTailError",
    "UnderdeterminedFitError",
    "DegenerateExponentError",
    # series
    "PriceSeries",
    "TickSeries",
    # dissect
    "Runner",
    "Dissection",
    "Coastline",
    "dissect",
    "count_dc",
    "avg_overshoot",
    "coastline",
    # scaling
    "ThresholdGrid",
    "LawSample",
    "LawFit",
    "TailEstimate",
    "fit_power_law",
    "dc_count_law",
    "overshoot_law",
    "tail_exponent",
    # synth
    "GeneratorKind",
    "GeneratorSpec",
    "generate_series",
    "generate_pareto",
    # ingest
    "TickSource",
    "parse_ticks",
    "parse_price_points",
    "read_price_series",
    "mid_price",
    "to_price_series",
    "write_ticks",
    "write_price_series",
    # agent
    "AgentRules",
    "DirectionPolicy",
    "Fill",
    "AgentTrajectory",
    "on_event",
    "run_strategy",
]
