# Fuzzy-FX Indicators Module: Technical analysis oscillators
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from fuzzy_fx.exceptions import InsufficientDataError, InsufficientHistoryError
from fuzzy_fx.logger import get_logger
from fuzzy_fx.market_data import CandleSeries

logger = get_logger(__name__)

CCI_CONSTANT = 0.015
FLAT_RSI = 50.0
FLAT_STOCHASTIC = 50.0

Values = Union[Sequence[float], np.ndarray, pd.Series]


@dataclass(frozen=True, eq=False)
class IndicatorSeries:
    """
    Indicator values aligned to the bars of their source series.

    ``values`` is a float Series indexed by bar number and holds only the bars whose
    lookback window is complete.
    """

    name: str
    params: tuple[int, ...]
    values: pd.Series

    @property
    def label(self) -> str:
        return f"{self.name}({','.join(str(p) for p in self.params)})"

    @property
    def first_bar(self) -> int:
        return int(self.values.index[0])

    def __len__(self) -> int:
        return len(self.values)

    def is_defined(self, bar: int) -> bool:
        return bar in self.values.index

    def at(self, bar: int) -> float:
        if not self.is_defined(bar):
            raise InsufficientHistoryError(f"{self.label} is undefined at bar {bar}")
        return float(self.values.loc[bar])

    def items(self) -> list[tuple[int, float]]:
        return [(int(bar), float(value)) for bar, value in self.values.items()]

    def aligned(self, bars: int) -> pd.Series:
        """Values over bars ``0..bars-1`` with NaN where the lookback is not satisfied."""
        return self.values.reindex(pd.RangeIndex(bars))


def _check_period(name: str, value: int) -> None:
    if int(value) != value or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")


def _as_series(values: Values) -> pd.Series:
    if isinstance(values, pd.Series):
        return values.astype(float)
    return pd.Series(np.asarray(values, dtype=float))


def _require(available: int, needed: int, what: str) -> None:
    if available < needed:
        logger.error(f"{what} needs {needed} values, got {available}")
        raise InsufficientDataError(f"{what} needs at least {needed} values, got {available}")


def _rolling_mean(series: pd.Series, period: int) -> pd.Series:
    return series.rolling(window=period).mean().iloc[period - 1 :]


def rsi_lookback(period: int) -> int:
    """First bar with a defined RSI value."""
    return period


def cci_lookback(period: int) -> int:
    """First bar with a defined CCI value."""
    return period - 1


def stochastic_lookback(k_period: int, d_period: int, slowing: int) -> int:
    """First bar where both slow %K and %D are defined."""
    return k_period + slowing + d_period - 3


def sma(values: Values, period: int) -> IndicatorSeries:
    """Simple moving average; a Series input keeps its index."""
    _check_period("period", period)
    series = _as_series(values)
    _require(len(series), period, f"SMA({period})")
    return IndicatorSeries("SMA", (period,), _rolling_mean(series, period))


def rsi(closes: Values, period: int = 14) -> IndicatorSeries:
    """
    Relative Strength Index with Wilder smoothing.

    The first average gain/loss is the simple mean of the first ``period`` price
    changes; later averages follow ``avg = (prev * (period - 1) + current) / period``.
    A window without losses reads 100, a window without any movement reads 50.
    """
    _check_period("period", period)
    closes = _as_series(closes)
    _require(len(closes), period + 1, f"RSI({period})")

    delta = closes.diff()
    moves = pd.DataFrame({"gain": delta.clip(lower=0.0), "loss": (-delta).clip(lower=0.0)})
    seed = moves.iloc[1 : period + 1].mean().to_frame().T
    seed.index = closes.index[period : period + 1]
    averages = pd.concat([seed, moves.iloc[period + 1 :]]).ewm(
        alpha=1.0 / period, adjust=False
    ).mean()

    avg_gain = averages["gain"].to_numpy()
    avg_loss = averages["loss"].to_numpy()
    with np.errstate(divide="ignore", invalid="ignore"):
        values = 100.0 - 100.0 / (1.0 + avg_gain / avg_loss)
    values = np.where(avg_loss == 0, np.where(avg_gain == 0, FLAT_RSI, 100.0), values)

    return IndicatorSeries("RSI", (period,), pd.Series(values, index=averages.index))


def cci(candles: CandleSeries, period: int = 20) -> IndicatorSeries:
    """
    Commodity Channel Index (Lambert).

    ``(TP - SMA(TP)) / (0.015 * mean absolute deviation)`` over the typical price
    ``(high + low + close) / 3``. A window without deviation reads 0. Unbounded.
    """
    _check_period("period", period)
    _require(len(candles), period, f"CCI({period})")

    typical = (candles.highs + candles.lows + candles.closes) / 3.0
    windows = sliding_window_view(typical, period)
    mean = windows.mean(axis=1)
    mean_dev = np.abs(windows - mean[:, None]).mean(axis=1)
    flat = windows.max(axis=1) == windows.min(axis=1)

    with np.errstate(divide="ignore", invalid="ignore"):
        values = (typical[period - 1 :] - mean) / (CCI_CONSTANT * mean_dev)
    values = np.where(flat | (mean_dev == 0), 0.0, values)

    index = pd.RangeIndex(period - 1, len(candles))
    return IndicatorSeries("CCI", (period,), pd.Series(values, index=index))


def stochastic(
    candles: CandleSeries,
    k_period: int = 5,
    d_period: int = 3,
    slowing: int = 3,
) -> tuple[IndicatorSeries, IndicatorSeries]:
    """
    Slow stochastic oscillator.

    raw %K is the close's position in the ``k_period`` high-low range (50 when the
    range is empty), slow %K its ``slowing``-bar SMA, and %D the ``d_period``-bar SMA
    of slow %K.

    Returns:
        (slow %K, %D)
    """
    for name, value in (("k_period", k_period), ("d_period", d_period), ("slowing", slowing)):
        _check_period(name, value)
    params = (k_period, d_period, slowing)
    _require(len(candles), k_period + slowing + d_period - 2, f"Stochastic{params}")

    frame = candles.frame.reset_index(drop=True)
    highest = frame["high"].rolling(window=k_period).max()
    lowest = frame["low"].rolling(window=k_period).min()
    span = highest - lowest

    with np.errstate(divide="ignore", invalid="ignore"):
        raw_k = 100.0 * ((frame["close"] - lowest) / span)
    raw_k = raw_k.where(span != 0, FLAT_STOCHASTIC).iloc[k_period - 1 :]

    slow_k = _rolling_mean(raw_k, slowing).clip(0.0, 100.0)
    d_line = _rolling_mean(slow_k, d_period).clip(0.0, 100.0)
    return (
        IndicatorSeries("STOCH_K", params, slow_k),
        IndicatorSeries("STOCH_D", params, d_line),
    )
