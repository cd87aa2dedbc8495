import dataclasses
import math

import pytest

from conftest import make_candles
from fuzzy_fx.backtest import Direction, ExitReason, _verify, run_backtest
from fuzzy_fx.config import BacktestConfig
from fuzzy_fx.exceptions import InsufficientHistoryError, InvariantViolationError
from fuzzy_fx.strategy import STRATEGY_NAMES, EnsembleStrategy, Strategy, TradeSignal, make_strategy


class ScriptedStrategy(Strategy):
    """Emits fixed signals at given bars, Neutral elsewhere."""

    name = "scripted"

    def __init__(self, script, warmup=0):
        super().__init__()
        self.script = script
        self._warmup = warmup

    @property
    def warmup(self):
        return self._warmup

    def _prepare(self, candles):
        return None

    def _evaluate(self, prepared, bar):
        return self.script.get(bar, TradeSignal.NEUTRAL)


class NeutralStrategy(ScriptedStrategy):
    name = "neutral"

    def __init__(self):
        super().__init__({})


def staircase():
    """Flat at 1.1000 for bars 0-6, then +10 pips a bar up to 1.1050 at bar 11, then flat."""
    return make_candles([1.1] * 7 + [1.101, 1.102, 1.103, 1.104, 1.105] + [1.105] * 3)


def flat_with(overrides, n=6):
    opens, closes = [1.1] * n, [1.1] * n
    highs, lows = [1.1] * n, [1.1] * n
    for bar, (o, h, lo, c) in overrides.items():
        opens[bar], highs[bar], lows[bar], closes[bar] = o, h, lo, c
    return make_candles(opens, closes, highs, lows)


def test_neutral_strategy_never_trades(walk_candles):
    report = run_backtest(walk_candles, NeutralStrategy())
    assert report.trade_count == 0
    assert report.net_profit == 0.0
    assert report.final_capital == report.initial_capital
    assert report.profit_factor == 0.0
    assert report.max_drawdown == 0.0
    assert {p.equity for p in report.equity_curve} == {10000.0}


def test_signal_fills_at_next_open_and_reverses():
    script = {5: TradeSignal.BUY, 10: TradeSignal.SELL}
    report = run_backtest(staircase(), ScriptedStrategy(script))

    long, short = report.trades
    assert long.direction is Direction.LONG
    assert (long.entry_bar, long.exit_bar) == (6, 11)
    assert long.entry_price == pytest.approx(1.1)
    assert long.exit_price == pytest.approx(1.105)
    assert long.pnl == pytest.approx(500.0)
    assert long.exit_reason is ExitReason.OPPOSITE_SIGNAL

    assert short.direction is Direction.SHORT
    assert (short.entry_bar, short.exit_bar) == (11, 14)
    assert short.pnl == pytest.approx(0.0, abs=1e-9)
    assert short.exit_reason is ExitReason.END_OF_DATA

    assert report.final_capital == pytest.approx(10500.0)
    assert report.win_count == 1
    assert math.isinf(report.profit_factor)
    assert report.max_drawdown == 0.0


def test_spread_is_charged_on_both_legs():
    script = {5: TradeSignal.BUY, 10: TradeSignal.SELL}
    cfg = BacktestConfig(spread_pips=2.0)
    report = run_backtest(staircase(), ScriptedStrategy(script), cfg)

    long, short = report.trades
    assert long.entry_price == pytest.approx(1.1001)
    assert long.exit_price == pytest.approx(1.1049)
    assert long.pnl == pytest.approx(480.0)
    assert short.pnl == pytest.approx(-20.0)
    assert report.gross_loss == pytest.approx(20.0)
    assert report.profit_factor == pytest.approx(24.0)
    assert report.net_profit == pytest.approx(460.0)


def test_open_position_is_marked_at_close_net_of_spread():
    cfg = BacktestConfig(spread_pips=2.0)
    report = run_backtest(staircase(), ScriptedStrategy({5: TradeSignal.BUY}), cfg)
    by_bar = {p.bar: p.equity for p in report.equity_curve}
    assert by_bar[5] == 10000.0
    assert by_bar[6] == pytest.approx(9980.0)
    assert by_bar[7] == pytest.approx(10080.0)


def test_lot_size_scales_pnl():
    script = {5: TradeSignal.BUY, 10: TradeSignal.SELL}
    report = run_backtest(staircase(), ScriptedStrategy(script), BacktestConfig(lot_size=10_000))
    assert report.trades[0].pnl == pytest.approx(50.0)


def test_repeated_signal_does_not_pyramid():
    script = {bar: TradeSignal.BUY for bar in range(2, 10)}
    report = run_backtest(staircase(), ScriptedStrategy(script))
    assert report.trade_count == 1
    assert report.trades[0].entry_bar == 3


def test_order_pending_on_last_bar_never_opens():
    candles = staircase()
    report = run_backtest(candles, ScriptedStrategy({len(candles) - 2: TradeSignal.BUY}))
    assert report.trade_count == 0


def test_order_pending_on_last_bar_still_closes():
    candles = staircase()
    last = len(candles) - 1
    script = {3: TradeSignal.BUY, last - 1: TradeSignal.SELL}
    report = run_backtest(candles, ScriptedStrategy(script))
    assert report.trade_count == 1
    assert report.trades[0].exit_bar == last
    assert report.trades[0].exit_reason is ExitReason.OPPOSITE_SIGNAL


STOPS = BacktestConfig(stop_loss_pips=20, take_profit_pips=30)


@pytest.mark.parametrize(
    "bar2, reason, pnl",
    [
        ((1.1, 1.1, 1.0975, 1.1), ExitReason.STOP_LOSS, -200.0),
        ((1.097, 1.097, 1.096, 1.097), ExitReason.STOP_LOSS, -300.0),
        ((1.1, 1.1035, 1.1, 1.1), ExitReason.TAKE_PROFIT, 300.0),
        ((1.104, 1.104, 1.104, 1.104), ExitReason.TAKE_PROFIT, 400.0),
        ((1.1, 1.104, 1.097, 1.1), ExitReason.STOP_LOSS, -200.0),
    ],
    ids=["stop", "gap-through-stop", "target", "gap-through-target", "both-touched"],
)
def test_long_stops(bar2, reason, pnl):
    report = run_backtest(flat_with({2: bar2}), ScriptedStrategy({0: TradeSignal.BUY}), STOPS)
    (trade,) = report.trades
    assert trade.exit_bar == 2
    assert trade.exit_reason is reason
    assert trade.pnl == pytest.approx(pnl)


def test_short_stop_loss_above_entry():
    candles = flat_with({2: (1.1, 1.1025, 1.1, 1.1)})
    report = run_backtest(candles, ScriptedStrategy({0: TradeSignal.SELL}), STOPS)
    (trade,) = report.trades
    assert trade.direction is Direction.SHORT
    assert trade.exit_reason is ExitReason.STOP_LOSS
    assert trade.pnl == pytest.approx(-200.0)


def test_stops_skip_the_entry_bar():
    candles = flat_with({1: (1.1, 1.1, 1.095, 1.1)})
    report = run_backtest(candles, ScriptedStrategy({0: TradeSignal.BUY}), STOPS)
    (trade,) = report.trades
    assert trade.exit_reason is ExitReason.END_OF_DATA


def test_stop_levels_measured_from_mid_not_fill():
    cfg = BacktestConfig(stop_loss_pips=20, spread_pips=2.0)
    candles = flat_with({2: (1.1, 1.1, 1.0981, 1.1)})
    report = run_backtest(candles, ScriptedStrategy({0: TradeSignal.BUY}), cfg)
    assert report.trades[0].exit_reason is ExitReason.END_OF_DATA


@pytest.mark.parametrize("name", STRATEGY_NAMES)
def test_accounting_identity(walk_candles, name):
    cfg = BacktestConfig(spread_pips=1.5, stop_loss_pips=40, take_profit_pips=60)
    report = run_backtest(walk_candles, make_strategy(name), cfg)

    assert report.final_capital == pytest.approx(report.initial_capital + sum(report.pnls))
    assert report.net_profit == pytest.approx(report.gross_profit - report.gross_loss)
    assert report.equity_curve[-1].equity == pytest.approx(report.final_capital)
    assert len(report.equity_curve) == len(walk_candles) - make_strategy(name).warmup
    assert 0.0 <= report.max_drawdown <= 1.0
    for before, after in zip(report.trades, report.trades[1:]):
        assert after.entry_bar >= before.exit_bar


def test_trend_fixture_enters_long_after_first_buy(trending_candles):
    report = run_backtest(trending_candles, EnsembleStrategy())
    assert report.trade_count >= 1
    assert report.trades[0].direction is Direction.LONG
    assert report.trades[0].entry_bar == 47


def test_short_series_has_no_evaluable_bar(walk_candles):
    with pytest.raises(InsufficientHistoryError):
        run_backtest(walk_candles.head(46), EnsembleStrategy())


def test_runs_are_deterministic(walk_candles):
    cfg = BacktestConfig(spread_pips=1.0)
    first = run_backtest(walk_candles, EnsembleStrategy(), cfg)
    second = run_backtest(walk_candles, EnsembleStrategy(), cfg)
    assert first == second


def test_frames(walk_candles):
    report = run_backtest(walk_candles, make_strategy("rsi-classic"))
    assert list(report.equity_frame().columns) == ["bar", "timestamp", "equity"]
    trades = report.trades_frame()
    assert len(trades) == report.trade_count
    assert "exit_reason" in trades.columns


def test_verify_rejects_broken_books():
    script = {5: TradeSignal.BUY, 10: TradeSignal.SELL}
    report = run_backtest(staircase(), ScriptedStrategy(script))
    with pytest.raises(InvariantViolationError):
        _verify(dataclasses.replace(report, final_capital=report.final_capital + 1.0), 10500.0)
    backwards = dataclasses.replace(report.trades[0], exit_bar=report.trades[0].entry_bar)
    with pytest.raises(InvariantViolationError):
        _verify(dataclasses.replace(report, trades=(backwards,)), report.final_capital)


def test_wiped_out_account_caps_drawdown_at_one():
    # Long at 1.1000, then a 1500-pip collapse on one lot
    candles = make_candles([1.1, 1.1, 1.1, 0.95, 0.95])
    report = run_backtest(candles, ScriptedStrategy({1: TradeSignal.BUY}))
    assert report.trades[0].pnl == pytest.approx(-15000.0)
    assert report.final_capital == pytest.approx(-5000.0)
    assert min(p.equity for p in report.equity_curve) < 0
    assert report.max_drawdown == 1.0


def test_verify_rejects_drawdown_outside_unit_interval():
    report = run_backtest(staircase(), ScriptedStrategy({5: TradeSignal.BUY}))
    with pytest.raises(InvariantViolationError):
        _verify(dataclasses.replace(report, max_drawdown=1.2), report.final_capital)
