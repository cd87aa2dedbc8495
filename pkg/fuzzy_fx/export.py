# Fuzzy-FX Export Module: Canonical JSON reports and CSV artifacts
from __future__ import annotations

import json
import math
import sys
from pathlib import Path
from typing import Any, Optional, Union

import pandas as pd

from fuzzy_fx.backtest import BacktestReport
from fuzzy_fx.compare import ComparisonResult
from fuzzy_fx.config import RunManifest
from fuzzy_fx.exceptions import FuzzyFxError
from fuzzy_fx.logger import get_logger
from fuzzy_fx.market_data import CandleSeries
from fuzzy_fx.strategy import IndicatorPanel

logger = get_logger(__name__)

EQUITY_COLUMNS = ("bar", "timestamp", "equity")
TRADE_COLUMNS = (
    "direction",
    "entry_bar",
    "exit_bar",
    "entry_price",
    "exit_price",
    "pnl",
    "exit_reason",
)


def _number(value: float) -> Union[float, str]:
    """JSON has no infinity literal."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


def _repr_float(value: float) -> str:
    return repr(float(value))


def _timestamp(ts: pd.Timestamp) -> str:
    return ts.tz_convert("UTC").isoformat().replace("+00:00", "Z")


def report_to_dict(report: BacktestReport, manifest: RunManifest) -> dict[str, Any]:
    """Report fields in their fixed output order, followed by the run manifest."""
    return {
        "strategy": report.strategy,
        "symbol": report.symbol,
        "bars": report.bars,
        "trade_count": report.trade_count,
        "win_count": report.win_count,
        "net_profit": _number(report.net_profit),
        "gross_profit": _number(report.gross_profit),
        "gross_loss": _number(report.gross_loss),
        "profit_factor": _number(report.profit_factor),
        "max_drawdown": _number(report.max_drawdown),
        "final_capital": _number(report.final_capital),
        "manifest": manifest.model_dump(mode="json"),
    }


def canonical_json(data: Any) -> str:
    """Fixed key order, shortest round-trip floats, trailing newline."""
    return json.dumps(data, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def report_json(report: BacktestReport, manifest: RunManifest) -> str:
    return canonical_json(report_to_dict(report, manifest))


def comparison_json(result: ComparisonResult, manifest: RunManifest) -> str:
    return canonical_json([report_to_dict(r, manifest) for r in result.reports])


def equity_csv(report: BacktestReport) -> str:
    frame = report.equity_frame()
    frame["timestamp"] = [_timestamp(ts) for ts in frame["timestamp"]]
    return frame.to_csv(
        index=False, columns=list(EQUITY_COLUMNS), lineterminator="\n", float_format=_repr_float
    )


def trades_csv(report: BacktestReport) -> str:
    return report.trades_frame().to_csv(
        index=False, columns=list(TRADE_COLUMNS), lineterminator="\n", float_format=_repr_float
    )


def indicators_csv(panel: IndicatorPanel, candles: CandleSeries) -> str:
    """One row per bar; cells before a variant's lookback are empty."""
    frame = panel.to_frame()
    frame.insert(0, "timestamp", [_timestamp(ts) for ts in candles.timestamps])
    return frame.to_csv(index=True, lineterminator="\n", float_format=_repr_float, na_rep="")


def write_text(text: str, path: Optional[Union[str, Path]] = None) -> Optional[str]:
    """Write to ``path``, or to standard output when no path is given."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return None

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as e:
        logger.error(f"Cannot write {path}: {e}")
        raise FuzzyFxError(f"Cannot write {path}: {e}") from e
    return str(path.absolute())
