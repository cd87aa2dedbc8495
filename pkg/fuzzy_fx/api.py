# Fuzzy-FX API Module: Main user-facing functions
from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional, Union

from fuzzy_fx.analytics import compute_metrics, format_metrics
from fuzzy_fx.backtest import BacktestReport, run_backtest
from fuzzy_fx.compare import ComparisonResult, compare_strategies
from fuzzy_fx.config import BacktestConfig, RunManifest, StrategyConfig, load_config
from fuzzy_fx.market_data import CandleSeries, read_candles
from fuzzy_fx.strategy import IndicatorPanel, indicator_panel, make_strategy

PathLike = Union[str, Path]
Command = Literal["backtest", "compare", "indicators"]


def resolve_config(
    config_path: Optional[PathLike] = None,
) -> tuple[StrategyConfig, BacktestConfig]:
    """Settings from ``config_path``, or the defaults when it is None."""
    if config_path is None:
        return StrategyConfig(), BacktestConfig()
    return load_config(config_path)


def manifest_for(
    command: Command,
    data_path: PathLike,
    config_path: Optional[PathLike],
    strategy_cfg: StrategyConfig,
    backtest_cfg: BacktestConfig,
) -> RunManifest:
    from fuzzy_fx import __version__

    return RunManifest(
        command=command,
        data_path=str(data_path),
        config_path=None if config_path is None else str(config_path),
        version=__version__,
        strategy=strategy_cfg,
        backtest=backtest_cfg,
    )


def backtest(
    data_path: PathLike,
    strategy: str = "ensemble",
    config_path: Optional[PathLike] = None,
    symbol: Optional[str] = None,
) -> tuple[BacktestReport, RunManifest]:
    """
    Backtest one strategy on a CSV file.

    This is the one-call entry point behind ``fuzzy-fx backtest``: it reads the
    candles, resolves the configuration and replays the candles through the named
    strategy.

    Args:
        data_path: OHLCV CSV file
        strategy: One of ensemble, rsi-fuzzy, cci-fuzzy, sto-fuzzy, rsi-classic,
                  cci-classic, sto-classic
        config_path: Optional TOML configuration file
        symbol: Symbol recorded in the report; defaults to the file name

    Returns:
        (report, manifest)
    """
    strategy_cfg, backtest_cfg = resolve_config(config_path)
    runner = make_strategy(strategy, strategy_cfg)
    candles = read_candles(data_path, symbol)
    report = run_backtest(candles, runner, backtest_cfg)
    return report, manifest_for("backtest", data_path, config_path, strategy_cfg, backtest_cfg)


def compare(
    data_path: PathLike,
    config_path: Optional[PathLike] = None,
    symbol: Optional[str] = None,
) -> tuple[ComparisonResult, RunManifest]:
    """
    Backtest the ensemble and the three classical baselines on a CSV file.

    Returns:
        (comparison, manifest); reports are ordered ensemble, rsi-classic,
        cci-classic, sto-classic.
    """
    strategy_cfg, backtest_cfg = resolve_config(config_path)
    candles = read_candles(data_path, symbol)
    result = compare_strategies(candles, strategy_cfg, backtest_cfg)
    return result, manifest_for("compare", data_path, config_path, strategy_cfg, backtest_cfg)


def indicators(
    data_path: PathLike,
    config_path: Optional[PathLike] = None,
) -> tuple[IndicatorPanel, CandleSeries, RunManifest]:
    """All nine indicator variants over a CSV file."""
    strategy_cfg, backtest_cfg = resolve_config(config_path)
    candles = read_candles(data_path)
    panel = indicator_panel(candles, strategy_cfg)
    return panel, candles, manifest_for(
        "indicators", data_path, config_path, strategy_cfg, backtest_cfg
    )


def metrics(
    data_path: PathLike,
    strategy: str = "ensemble",
    config_path: Optional[PathLike] = None,
    formatted: bool = True,
) -> dict:
    """
    Headline metrics of one strategy on a CSV file.

    Args:
        data_path: OHLCV CSV file
        strategy: Strategy name
        config_path: Optional TOML configuration file
        formatted: Return display strings instead of raw numbers

    Returns:
        Dictionary of metrics
    """
    report, _ = backtest(data_path, strategy, config_path)
    m = compute_metrics(report)
    return format_metrics(m) if formatted else m
