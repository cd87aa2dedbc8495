# Fuzzy-FX Backtest Module: Single-position bar replay
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import pandas as pd

from fuzzy_fx import analytics
from fuzzy_fx.config import BacktestConfig
from fuzzy_fx.exceptions import EmptySeriesError, InsufficientHistoryError, InvariantViolationError
from fuzzy_fx.logger import get_logger
from fuzzy_fx.market_data import CandleSeries
from fuzzy_fx.strategy import Strategy, TradeSignal

logger = get_logger(__name__)

ACCOUNTING_TOLERANCE = 1e-6


class Direction(str, Enum):
    LONG = "Long"
    SHORT = "Short"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.LONG else -1

    @classmethod
    def from_signal(cls, signal: TradeSignal) -> Optional[Direction]:
        if signal is TradeSignal.BUY:
            return cls.LONG
        if signal is TradeSignal.SELL:
            return cls.SHORT
        return None


class ExitReason(str, Enum):
    OPPOSITE_SIGNAL = "OppositeSignal"
    STOP_LOSS = "StopLoss"
    TAKE_PROFIT = "TakeProfit"
    END_OF_DATA = "EndOfData"


@dataclass(frozen=True)
class Trade:
    """A closed round trip; prices are fills net of half the spread."""

    direction: Direction
    entry_bar: int
    exit_bar: int
    entry_price: float
    exit_price: float
    pnl: float
    exit_reason: ExitReason


@dataclass(frozen=True)
class EquityPoint:
    """Closed balance plus open-position mark-to-market at a bar's close."""

    bar: int
    timestamp: pd.Timestamp
    equity: float


@dataclass(frozen=True)
class BacktestReport:
    strategy: str
    symbol: str
    bars: int
    initial_capital: float
    trades: tuple[Trade, ...]
    equity_curve: tuple[EquityPoint, ...]
    net_profit: float
    gross_profit: float
    gross_loss: float
    profit_factor: float
    max_drawdown: float
    trade_count: int
    win_count: int
    final_capital: float
    no_rule_fired: int = 0

    @property
    def pnls(self) -> list[float]:
        return [t.pnl for t in self.trades]

    @property
    def win_rate(self) -> float:
        return analytics.win_rate(self.pnls)

    @property
    def average_trade(self) -> float:
        return analytics.average_trade(self.pnls)

    @property
    def largest_win(self) -> float:
        return analytics.largest_win(self.pnls)

    @property
    def largest_loss(self) -> float:
        return analytics.largest_loss(self.pnls)

    def equity_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "bar": [p.bar for p in self.equity_curve],
                "timestamp": [p.timestamp for p in self.equity_curve],
                "equity": [p.equity for p in self.equity_curve],
            }
        )

    def trades_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "direction": t.direction.value,
                    "entry_bar": t.entry_bar,
                    "exit_bar": t.exit_bar,
                    "entry_price": t.entry_price,
                    "exit_price": t.exit_price,
                    "pnl": t.pnl,
                    "exit_reason": t.exit_reason.value,
                }
                for t in self.trades
            ],
            columns=[
                "direction",
                "entry_bar",
                "exit_bar",
                "entry_price",
                "exit_price",
                "pnl",
                "exit_reason",
            ],
        )


@dataclass
class _Position:
    direction: Direction
    entry_bar: int
    entry_mid: float
    entry_fill: float


@dataclass
class _Account:
    cfg: BacktestConfig
    balance: float
    position: Optional[_Position] = None
    trades: list[Trade] = field(default_factory=list)

    def _pnl(self, direction: Direction, entry_fill: float, exit_fill: float) -> float:
        pips = direction.sign * (exit_fill - entry_fill) / self.cfg.pip
        return pips * self.cfg.pip_value * self.cfg.lots

    def open(self, direction: Direction, bar: int, price: float) -> None:
        price = float(price)
        fill = price + direction.sign * self.cfg.half_spread
        self.position = _Position(direction, bar, price, fill)

    def close(self, bar: int, price: float, reason: ExitReason) -> None:
        pos = self.position
        assert pos is not None
        fill = float(price) - pos.direction.sign * self.cfg.half_spread
        pnl = self._pnl(pos.direction, pos.entry_fill, fill)
        self.trades.append(
            Trade(pos.direction, pos.entry_bar, bar, pos.entry_fill, fill, pnl, reason)
        )
        self.balance += pnl
        self.position = None

    def equity(self, close: float) -> float:
        pos = self.position
        if pos is None:
            return float(self.balance)
        mark = float(close) - pos.direction.sign * self.cfg.half_spread
        return self.balance + self._pnl(pos.direction, pos.entry_fill, mark)

    def check_exits(self, bar: int, o: float, h: float, lo: float) -> None:
        """Close on a stop-loss or take-profit touched within the bar; stop-loss wins ties."""
        pos = self.position
        cfg = self.cfg
        if pos is None or (cfg.stop_loss_pips is None and cfg.take_profit_pips is None):
            return
        sign = pos.direction.sign
        # Worst and best prices reached within the bar for this direction.
        adverse = lo if sign > 0 else h
        favourable = h if sign > 0 else lo

        if cfg.stop_loss_pips is not None:
            level = pos.entry_mid - sign * cfg.stop_loss_pips * cfg.pip
            if sign * (adverse - level) <= 0:
                fill = o if sign * (o - level) <= 0 else level
                self.close(bar, fill, ExitReason.STOP_LOSS)
                return
        if cfg.take_profit_pips is not None:
            level = pos.entry_mid + sign * cfg.take_profit_pips * cfg.pip
            if sign * (favourable - level) >= 0:
                fill = o if sign * (o - level) >= 0 else level
                self.close(bar, fill, ExitReason.TAKE_PROFIT)


def _verify(report: BacktestReport, balance: float) -> None:
    scale = max(1.0, abs(balance))
    if abs(report.final_capital - balance) > ACCOUNTING_TOLERANCE * scale:
        raise InvariantViolationError(
            f"Final capital {report.final_capital} disagrees with the closed balance {balance}"
        )
    if report.gross_profit < 0 or report.gross_loss < 0:
        raise InvariantViolationError("Gross profit and gross loss must be non-negative")
    if not 0.0 <= report.max_drawdown <= 1.0:
        raise InvariantViolationError(f"Max drawdown {report.max_drawdown} is outside [0, 1]")
    for trade in report.trades:
        if trade.exit_bar <= trade.entry_bar:
            raise InvariantViolationError(
                f"Trade exits at bar {trade.exit_bar} before entering at {trade.entry_bar}"
            )


def run_backtest(
    candles: CandleSeries,
    strategy: Strategy,
    cfg: Optional[BacktestConfig] = None,
) -> BacktestReport:
    """
    Replay ``candles`` through ``strategy`` with at most one open position.

    Signals are read at a bar's close and filled at the next bar's open: Buy opens a
    long and Sell a short when flat, an opposite signal closes and reverses. Stops are
    checked from the bar after entry against the bar's range. Any position still open
    at the last bar closes at its close. One equity point is recorded per bar from the
    strategy's first evaluable bar.

    Raises:
        EmptySeriesError: no candles.
        InsufficientHistoryError: the series is shorter than the strategy's lookback.
    """
    cfg = cfg or BacktestConfig()
    if len(candles) == 0:
        raise EmptySeriesError()

    signals = strategy.generate(candles)
    if signals.empty:
        logger.error(
            f"{strategy.name} needs more than {strategy.warmup} bars, got {len(candles)}"
        )
        raise InsufficientHistoryError(
            f"{strategy.name} has no evaluable bar: it needs more than {strategy.warmup} "
            f"bars, the series has {len(candles)}"
        )

    n = len(candles)
    opens, highs, lows, closes = candles.opens, candles.highs, candles.lows, candles.closes
    stamps = candles.timestamps
    first_bar = int(signals.index[0])

    account = _Account(cfg, float(cfg.initial_capital))
    pending: Optional[Direction] = None
    curve: list[EquityPoint] = []

    for bar in range(first_bar, n):
        if pending is not None:
            if account.position is not None and account.position.direction is not pending:
                account.close(bar, opens[bar], ExitReason.OPPOSITE_SIGNAL)
            if account.position is None and bar < n - 1:
                account.open(pending, bar, opens[bar])
            pending = None

        if account.position is not None and bar > account.position.entry_bar:
            account.check_exits(bar, opens[bar], highs[bar], lows[bar])

        if bar == n - 1:
            if account.position is not None:
                account.close(bar, closes[bar], ExitReason.END_OF_DATA)
        else:
            target = Direction.from_signal(signals.get(bar, TradeSignal.NEUTRAL))
            held = account.position.direction if account.position is not None else None
            if target is not None and target is not held:
                pending = target

        curve.append(EquityPoint(bar, stamps[bar], account.equity(closes[bar])))

    bust = next((p for p in curve if p.equity <= 0), None)
    if bust is not None:
        logger.warning(
            f"{strategy.name} on {candles.symbol}: equity fell to {bust.equity:,.2f} "
            f"at bar {bust.bar}, max drawdown capped at 100%"
        )

    pnls = [t.pnl for t in account.trades]
    gp = analytics.gross_profit(pnls)
    gl = analytics.gross_loss(pnls)
    net = gp - gl
    report = BacktestReport(
        strategy=strategy.name,
        symbol=candles.symbol,
        bars=n,
        initial_capital=float(cfg.initial_capital),
        trades=tuple(account.trades),
        equity_curve=tuple(curve),
        net_profit=net,
        gross_profit=gp,
        gross_loss=gl,
        profit_factor=analytics.profit_factor(gp, gl),
        max_drawdown=analytics.max_drawdown(curve),
        trade_count=len(pnls),
        win_count=analytics.win_count(pnls),
        final_capital=float(cfg.initial_capital) + net,
        no_rule_fired=strategy.no_rule_fired,
    )
    _verify(report, account.balance)

    pf = "inf" if math.isinf(report.profit_factor) else f"{report.profit_factor:.2f}"
    logger.info(
        f"{strategy.name} on {candles.symbol}: {report.trade_count} trades, "
        f"net profit {report.net_profit:,.2f}, profit factor {pf}"
    )
    if report.no_rule_fired:
        logger.info(f"{strategy.name}: no rule fired on {report.no_rule_fired} evaluation(s)")
    return report
