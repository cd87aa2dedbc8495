# Fuzzy-FX Market Data Module: OHLCV candle ingestion and validation
from __future__ import annotations

import io
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, Optional, Union

import numpy as np
import pandas as pd

from fuzzy_fx.exceptions import (
    EmptySeriesError,
    FuzzyFxDataError,
    MalformedRowError,
    MissingColumnError,
    NonMonotonicTimestampError,
)
from fuzzy_fx.logger import get_logger

logger = get_logger(__name__)

REQUIRED_COLUMNS = ("timestamp", "open", "high", "low", "close", "volume")
PRICE_COLUMNS = ("open", "high", "low", "close")
NUMERIC_COLUMNS = PRICE_COLUMNS + ("volume",)
DEFAULT_TIMEFRAME = "H1"


@dataclass(frozen=True)
class Candle:
    """A single OHLCV bar."""

    timestamp: pd.Timestamp
    open: float
    high: float
    low: float
    close: float
    volume: float


class CandleSeries:
    """
    An immutable, validated sequence of candles for one symbol.

    Candles are held in a DataFrame indexed by UTC timestamp with float columns
    ``open, high, low, close, volume``. Accessors hand out copies, so the series
    can be shared read-only.
    """

    __slots__ = ("symbol", "timeframe", "_frame")

    def __init__(self, symbol: str, frame: pd.DataFrame, timeframe: str = DEFAULT_TIMEFRAME):
        self.symbol = symbol
        self.timeframe = timeframe
        self._frame = frame[list(NUMERIC_COLUMNS)].astype(float).rename_axis("timestamp")

    @classmethod
    def from_candles(
        cls,
        symbol: str,
        candles: Iterable[Candle],
        timeframe: str = DEFAULT_TIMEFRAME,
    ) -> CandleSeries:
        """Build a validated series from Candle objects."""
        candles = list(candles)
        if not candles:
            raise EmptySeriesError()
        index = pd.DatetimeIndex([pd.Timestamp(c.timestamp) for c in candles])
        index = index.tz_localize("UTC") if index.tz is None else index.tz_convert("UTC")
        frame = pd.DataFrame(
            {col: [float(getattr(c, col)) for c in candles] for col in NUMERIC_COLUMNS},
            index=index,
        )
        _validate(frame)
        return cls(symbol, frame, timeframe)

    @property
    def frame(self) -> pd.DataFrame:
        return self._frame.copy()

    @property
    def timestamps(self) -> pd.DatetimeIndex:
        return self._frame.index.copy()

    @property
    def opens(self) -> np.ndarray:
        return self._frame["open"].to_numpy(copy=True)

    @property
    def highs(self) -> np.ndarray:
        return self._frame["high"].to_numpy(copy=True)

    @property
    def lows(self) -> np.ndarray:
        return self._frame["low"].to_numpy(copy=True)

    @property
    def closes(self) -> np.ndarray:
        return self._frame["close"].to_numpy(copy=True)

    @property
    def candles(self) -> list[Candle]:
        return list(self)

    def __len__(self) -> int:
        return len(self._frame)

    def __getitem__(self, bar: int) -> Candle:
        row = self._frame.iloc[bar]
        return Candle(
            timestamp=self._frame.index[bar],
            open=float(row["open"]),
            high=float(row["high"]),
            low=float(row["low"]),
            close=float(row["close"]),
            volume=float(row["volume"]),
        )

    def __iter__(self) -> Iterator[Candle]:
        for bar in range(len(self)):
            yield self[bar]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CandleSeries):
            return NotImplemented
        return (
            self.symbol == other.symbol
            and self.timeframe == other.timeframe
            and self._frame.equals(other._frame)
            and self._frame.index.equals(other._frame.index)
        )

    def __repr__(self) -> str:
        if self._frame.empty:
            return f"CandleSeries({self.symbol!r}, {self.timeframe!r}, empty)"
        first, last = self._frame.index[0], self._frame.index[-1]
        return (
            f"CandleSeries({self.symbol!r}, {self.timeframe!r}, {len(self)} bars, "
            f"{first.isoformat()} .. {last.isoformat()})"
        )

    def head(self, n: int) -> CandleSeries:
        """The first ``n`` candles."""
        return CandleSeries(self.symbol, self._frame.iloc[:n], self.timeframe)

    def scaled(self, factor: float) -> CandleSeries:
        """The same series with every OHLC price multiplied by ``factor``."""
        if factor <= 0:
            raise ValueError("Scale factor must be positive")
        frame = self.frame
        frame[list(PRICE_COLUMNS)] = frame[list(PRICE_COLUMNS)] * factor
        return CandleSeries(self.symbol, frame, self.timeframe)

    def to_csv(self) -> str:
        """Serialize in the ingestion format; ``parse_candles`` reads it back unchanged."""
        out = self.frame
        out.index = pd.Index([_format_timestamp(ts) for ts in out.index], name="timestamp")
        return out.to_csv(lineterminator="\n", float_format=lambda v: repr(float(v)))


def _format_timestamp(ts: pd.Timestamp) -> str:
    return ts.tz_convert("UTC").isoformat().replace("+00:00", "Z")


def _first_flagged(mask: pd.Series) -> Optional[int]:
    values = mask.to_numpy(dtype=bool)
    if not values.any():
        return None
    return int(np.argmax(values))


def _first_violation(
    checks: list[tuple[pd.Series, Callable[[int], str]]],
) -> Optional[tuple[int, str]]:
    """Earliest (position, reason) over all row checks; ties go to the earlier check."""
    found: Optional[tuple[int, str]] = None
    for mask, describe in checks:
        pos = _first_flagged(mask)
        if pos is not None and (found is None or pos < found[0]):
            found = (pos, describe(pos))
    return found


def _validate(frame: pd.DataFrame, raw: Optional[pd.DataFrame] = None) -> None:
    """Raise on the first row that breaks a candle invariant or the timestamp ordering."""
    checks: list[tuple[pd.Series, Callable[[int], str]]] = []

    if raw is not None:
        checks.append(((raw == "").all(axis=1), lambda pos: "blank line"))
        for col in REQUIRED_COLUMNS:
            checks.append((raw[col] == "", lambda pos, c=col: f"missing value for '{c}'"))
        checks.append(
            (
                frame.index.to_series().isna().reset_index(drop=True),
                lambda pos: f"invalid timestamp '{raw['timestamp'].iloc[pos]}'",
            )
        )

    for col in NUMERIC_COLUMNS:
        values = frame[col].reset_index(drop=True)
        if raw is not None:
            checks.append(
                (
                    values.isna() & (raw[col] != ""),
                    lambda pos, c=col: f"non-numeric {c} '{raw[c].iloc[pos]}'",
                )
            )
        checks.append(
            (
                values.notna() & ~np.isfinite(values),
                lambda pos, c=col: f"non-finite {c}",
            )
        )

    prices = frame[list(PRICE_COLUMNS)].reset_index(drop=True)
    volume = frame["volume"].reset_index(drop=True)
    checks.append(((prices <= 0).any(axis=1), lambda pos: "prices must be positive"))
    checks.append((volume < 0, lambda pos: "volume must be non-negative"))
    checks.append(
        (prices["high"] < prices["low"], lambda pos: "OHLC violation: high below low")
    )
    checks.append(
        (
            prices["low"] > prices[["open", "close"]].min(axis=1),
            lambda pos: "OHLC violation: low above open/close",
        )
    )
    checks.append(
        (
            prices["high"] < prices[["open", "close"]].max(axis=1),
            lambda pos: "OHLC violation: high below open/close",
        )
    )

    violation = _first_violation(checks)
    limit = violation[0] if violation is not None else len(frame)

    stamps = frame.index[:limit]
    if len(stamps) > 1:
        backwards = pd.Series(stamps[1:] <= stamps[:-1])
        pos = _first_flagged(backwards)
        if pos is not None:
            row = pos + 2
            logger.error(f"Non-monotonic timestamp at row {row}")
            raise NonMonotonicTimestampError(row)

    if violation is not None:
        pos, reason = violation
        logger.error(f"Malformed row {pos + 1}: {reason}")
        raise MalformedRowError(pos + 1, reason)


def parse_candles(
    csv_text: str,
    symbol: str,
    timeframe: str = DEFAULT_TIMEFRAME,
) -> CandleSeries:
    """
    Parse and validate OHLCV CSV text.

    The header must contain ``timestamp,open,high,low,close,volume``; timestamps are
    ISO 8601 (UTC, or offsets converted to UTC). Row numbers in errors are 1-based data
    rows, header excluded. A blank line between rows is a malformed row; trailing blank
    lines are ignored.

    Raises:
        MissingColumnError, MalformedRowError, NonMonotonicTimestampError, EmptySeriesError
    """
    text = csv_text.lstrip("\ufeff").rstrip()
    if not text:
        raise EmptySeriesError("CSV input is empty")
    text += "\n"

    header = [name.strip() for name in text.splitlines()[0].split(",")]
    for col in REQUIRED_COLUMNS:
        if col not in header:
            logger.error(f"CSV header lacks '{col}': {header}")
            raise MissingColumnError(col)

    try:
        raw = pd.read_csv(
            io.StringIO(text), dtype=str, keep_default_na=False, skip_blank_lines=False
        )
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        row = int(match.group(1)) - 1 if match else None
        raise MalformedRowError(row, "unexpected number of fields") from e

    raw.columns = [str(c).strip() for c in raw.columns]
    if raw.empty:
        raise EmptySeriesError(f"No candles found for {symbol}")
    raw = raw[list(REQUIRED_COLUMNS)].fillna("").apply(lambda col: col.str.strip())

    index = pd.DatetimeIndex(
        pd.to_datetime(raw["timestamp"], utc=True, errors="coerce", format="ISO8601"),
        name="timestamp",
    )
    numbers = raw[list(NUMERIC_COLUMNS)].apply(pd.to_numeric, errors="coerce")
    frame = pd.DataFrame(numbers.to_numpy(dtype=float), index=index, columns=NUMERIC_COLUMNS)

    _validate(frame, raw)

    series = CandleSeries(symbol, frame, timeframe)
    logger.debug(f"Parsed {len(series)} candles for {symbol} ({timeframe}).")
    return series


def read_candles(
    path: Union[str, Path],
    symbol: Optional[str] = None,
    timeframe: str = DEFAULT_TIMEFRAME,
) -> CandleSeries:
    """Read a CSV file; the symbol defaults to the upper-cased file stem."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as e:
        logger.error(f"Data file not found: {path}")
        raise FuzzyFxDataError(f"Data file not found: {path}") from e
    except (OSError, UnicodeDecodeError) as e:
        logger.error(f"Cannot read data file {path}: {e}")
        raise FuzzyFxDataError(f"Cannot read data file {path}: {e}") from e

    return parse_candles(text, symbol or path.stem.upper(), timeframe)
