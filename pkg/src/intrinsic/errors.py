"""Exception hierarchy shared across the package.

Two branches matter to callers: :class:`DataError` for anything wrong with
input data (malformed rows, time regressions, invalid prices) and
:class:`EstimationError` for statistically unusable inputs (too few events,
degenerate fits). The CLI maps them to exit codes 2 and 3 respectively.
"""


class IntrinsicError(Exception):
    """Base class for all package-specific errors."""


class DataError(IntrinsicError, ValueError):
    """Invalid input data."""


class ParseError(DataError):
    """A malformed row or header in an input file.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class TimeRegressionError(DataError):
    """Timestamps decreased within a series."""


class EstimationError(IntrinsicError):
    """An estimate cannot be produced from the given data."""


class InsufficientEventsError(EstimationError):
    """Too few events (or usable grid points) to compute the requested quantity."""


class InsufficientTailError(EstimationError):
    """Too few samples at or above the tail cutoff."""


class UnderdeterminedFitError(EstimationError):
    """Fewer than two distinct abscissae; a line cannot be fitted."""


class DegenerateExponentError(EstimationError):
    """The fitted exponent is (numerically) zero, so the scale constant is undefined."""
