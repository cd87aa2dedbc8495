# Fuzzy-FX Analytics Module: Trading performance metrics
from __future__ import annotations

import math
from typing import Any, Iterable, Sequence, Union

import numpy as np
import pandas as pd

from fuzzy_fx.exceptions import FuzzyFxComputeError
from fuzzy_fx.logger import get_logger

logger = get_logger(__name__)

DEFAULT_DRAWDOWN_LIMIT = 0.25

Curve = Union[pd.Series, Sequence[float], Sequence[Any]]


def _as_equity(curve: Curve, name: str = "equity curve") -> pd.Series:
    """Equity values of a curve given as EquityPoints, floats or a Series."""
    if isinstance(curve, pd.Series):
        equity = curve.astype(float)
    else:
        points = list(curve)
        if points and hasattr(points[0], "equity"):
            equity = pd.Series(
                [float(p.equity) for p in points], index=[int(p.bar) for p in points]
            )
        else:
            equity = pd.Series(np.asarray(points, dtype=float))
    if equity.empty:
        logger.error(f"Cannot compute metrics on empty series: {name}")
        raise FuzzyFxComputeError(f"Input series '{name}' is empty.")
    return equity


def profit_factor(gross_profit: float, gross_loss: float) -> float:
    """
    Gross profit over gross loss (a magnitude).

    A lossless run with profit returns ``inf``; a run with neither returns 0.
    """
    if gross_profit < 0 or gross_loss < 0:
        logger.error(f"Negative gross figures: {gross_profit} / {gross_loss}")
        raise FuzzyFxComputeError("Gross profit and gross loss must both be non-negative.")
    if gross_loss == 0:
        return math.inf if gross_profit > 0 else 0.0
    return gross_profit / gross_loss


def drawdown_series(curve: Curve) -> pd.Series:
    """
    Fractional decline from the running peak at every point.

    Equity at or below zero is a total loss: the decline is capped at 1, and a
    non-positive running peak reads 1 as well.
    """
    equity = _as_equity(curve)
    cummax = equity.cummax()
    with np.errstate(divide="ignore", invalid="ignore"):
        decline = (cummax - equity) / cummax
    return decline.where(cummax > 0, 1.0).clip(lower=0.0, upper=1.0)


def max_drawdown(curve: Curve) -> float:
    """Largest fractional decline from a running peak, in [0, 1]; 0 for a non-decreasing curve."""
    return float(drawdown_series(curve).max())


def gross_profit(pnls: Iterable[float]) -> float:
    return math.fsum(p for p in pnls if p > 0)


def gross_loss(pnls: Iterable[float]) -> float:
    """Magnitude of the summed losing trades."""
    return abs(math.fsum(p for p in pnls if p < 0))


def win_count(pnls: Iterable[float]) -> int:
    return sum(1 for p in pnls if p > 0)


def win_rate(pnls: Sequence[float]) -> float:
    """Share of winning trades."""
    return win_count(pnls) / len(pnls) if len(pnls) > 0 else 0.0


def average_trade(pnls: Sequence[float]) -> float:
    return math.fsum(pnls) / len(pnls) if len(pnls) > 0 else 0.0


def largest_win(pnls: Sequence[float]) -> float:
    return max((p for p in pnls if p > 0), default=0.0)


def largest_loss(pnls: Sequence[float]) -> float:
    return min((p for p in pnls if p < 0), default=0.0)


def within_drawdown_limit(drawdown: float, limit: float = DEFAULT_DRAWDOWN_LIMIT) -> bool:
    return drawdown <= limit


def compute_metrics(report: Any) -> dict:
    """Headline metrics of a BacktestReport."""
    return {
        "profit_factor": report.profit_factor,
        "net_profit": report.net_profit,
        "gross_profit": report.gross_profit,
        "gross_loss": report.gross_loss,
        "max_drawdown": report.max_drawdown,
        "trade_count": report.trade_count,
        "win_rate": report.win_rate,
        "final_capital": report.final_capital,
    }


def format_metrics(metrics: dict) -> dict:
    formatters = {
        "profit_factor": lambda x: "inf" if math.isinf(x) else f"{x:.2f}",
        "max_drawdown": lambda x: f"{x * 100:.2f}%",
        "win_rate": lambda x: f"{x * 100:.1f}%",
        "trade_count": lambda x: f"{x:d}",
        "win_count": lambda x: f"{x:d}",
    }
    return {k: formatters.get(k, lambda x: f"{x:,.2f}")(v) for k, v in metrics.items()}
