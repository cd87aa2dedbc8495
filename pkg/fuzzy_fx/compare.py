# Fuzzy-FX Compare Module: Side-by-side strategy backtests
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import pandas as pd

from fuzzy_fx.analytics import DEFAULT_DRAWDOWN_LIMIT, within_drawdown_limit
from fuzzy_fx.backtest import BacktestReport, run_backtest
from fuzzy_fx.config import BacktestConfig, StrategyConfig
from fuzzy_fx.logger import get_logger
from fuzzy_fx.market_data import CandleSeries
from fuzzy_fx.strategy import COMPARED_STRATEGIES, make_strategy

logger = get_logger(__name__)


class ComparisonResult:
    def __init__(
        self,
        symbol: str,
        reports: list[BacktestReport],
        drawdown_limit: float = DEFAULT_DRAWDOWN_LIMIT,
    ):
        self.symbol = symbol
        self.reports = reports
        self.drawdown_limit = drawdown_limit

    @property
    def strategies(self) -> list[str]:
        return [r.strategy for r in self.reports]

    def __len__(self) -> int:
        return len(self.reports)

    def __iter__(self):
        return iter(self.reports)

    def report(self, strategy: str) -> BacktestReport:
        for r in self.reports:
            if r.strategy == strategy:
                return r
        raise KeyError(strategy)

    def summary(self) -> pd.DataFrame:
        rows = []
        for r in self.reports:
            rows.append(
                {
                    "Strategy": r.strategy,
                    "Profit Factor": r.profit_factor,
                    "Net Profit": r.net_profit,
                    "Gross Profit": r.gross_profit,
                    "Gross Loss": r.gross_loss,
                    "Max Drawdown": r.max_drawdown,
                    "Trades": r.trade_count,
                    "Win Rate": r.win_rate,
                    "Within Limit": within_drawdown_limit(r.max_drawdown, self.drawdown_limit),
                }
            )
        return pd.DataFrame(rows).set_index("Strategy")

    def best_performer(self, metric: str = "profit_factor") -> str:
        return max(self.reports, key=lambda r: getattr(r, metric)).strategy

    def rank_by(self, metric: str = "profit_factor", ascending: bool = False) -> list[str]:
        ranked = sorted(self.reports, key=lambda r: getattr(r, metric), reverse=not ascending)
        return [r.strategy for r in ranked]

    def within_drawdown_limit(self, limit: Optional[float] = None) -> dict[str, bool]:
        """Whether each strategy's maximum drawdown stays within ``limit``."""
        limit = self.drawdown_limit if limit is None else limit
        return {r.strategy: within_drawdown_limit(r.max_drawdown, limit) for r in self.reports}


def compare_strategies(
    candles: CandleSeries,
    strategy_cfg: Optional[StrategyConfig] = None,
    backtest_cfg: Optional[BacktestConfig] = None,
    strategies: Sequence[str] = COMPARED_STRATEGIES,
    max_workers: int = 4,
) -> ComparisonResult:
    """
    Backtest each strategy on the same candles and settings.

    Reports come back in the order of ``strategies`` whatever order the runs finish in;
    the first failing run's error propagates.
    """
    strategy_cfg = strategy_cfg or StrategyConfig()
    backtest_cfg = backtest_cfg or BacktestConfig()

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {
            name: executor.submit(
                run_backtest, candles, make_strategy(name, strategy_cfg), backtest_cfg
            )
            for name in strategies
        }
        reports = [futures[name].result() for name in strategies]

    logger.debug(f"Compared {len(reports)} strategies on {candles.symbol}")
    return ComparisonResult(candles.symbol, reports)
