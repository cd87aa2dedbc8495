# Fuzzy-FX Exceptions Module
from __future__ import annotations

from typing import Optional


class FuzzyFxError(Exception):
    """Base exception for all Fuzzy-FX errors."""

    pass


class FuzzyFxDataError(FuzzyFxError):
    """Raised when market data cannot be read, parsed, or validated."""

    pass


class MissingColumnError(FuzzyFxDataError):
    """The CSV header lacks a required column."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"Missing required column: '{column}'")


class MalformedRowError(FuzzyFxDataError):
    """A data row could not be parsed or violates a candle invariant."""

    def __init__(self, row: Optional[int], reason: str):
        self.row = row
        self.reason = reason
        where = f"row {row}" if row is not None else "unknown row"
        super().__init__(f"Malformed {where}: {reason}")


class NonMonotonicTimestampError(FuzzyFxDataError):
    """Timestamps are not strictly increasing."""

    def __init__(self, row: int):
        self.row = row
        super().__init__(f"Timestamp at row {row} does not increase on the previous row")


class EmptySeriesError(FuzzyFxDataError):
    """The input holds no candles."""

    def __init__(self, message: str = "Candle series is empty"):
        super().__init__(message)


class FuzzyFxComputeError(FuzzyFxError):
    """Raised when an indicator, inference, or simulation step cannot be computed."""

    pass


class InsufficientDataError(FuzzyFxComputeError):
    """Fewer values than the indicator lookback requires."""

    pass


class InsufficientHistoryError(FuzzyFxComputeError):
    """A signal was requested for a bar without enough lookback behind it."""

    pass


class NoRuleFiredError(FuzzyFxComputeError):
    """Every rule of a fuzzy system fired with zero strength."""

    pass


class FuzzyFxConfigError(FuzzyFxError, ValueError):
    """Raised when there is an invalid configuration setting."""

    pass


class InvariantViolationError(FuzzyFxError):
    """An internal accounting or report invariant does not hold."""

    pass
