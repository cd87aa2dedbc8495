# Fuzzy-FX: A fuzzy-ensemble forex backtesting package
__version__ = "1.0.0"

from fuzzy_fx.exceptions import (
    FuzzyFxError,
    FuzzyFxDataError,
    FuzzyFxComputeError,
    FuzzyFxConfigError,
    MissingColumnError,
    MalformedRowError,
    NonMonotonicTimestampError,
    EmptySeriesError,
    InsufficientDataError,
    InsufficientHistoryError,
    NoRuleFiredError,
    InvariantViolationError,
)
from fuzzy_fx.market_data import Candle, CandleSeries, parse_candles, read_candles
from fuzzy_fx.indicators import IndicatorSeries, sma, rsi, cci, stochastic
from fuzzy_fx.fuzzy_engine import (
    Term,
    MembershipFunction,
    TermSet,
    FuzzyRule,
    FuzzyVerdict,
    FuzzySystem,
    membership,
    fuzzify,
    fire_rule,
    infer,
)
from fuzzy_fx.config import (
    StrategyConfig,
    BacktestConfig,
    RunManifest,
    load_config,
)
from fuzzy_fx.strategy import (
    TradeSignal,
    IndicatorKind,
    Strategy,
    EnsembleStrategy,
    FuzzyStrategy,
    ClassicalStrategy,
    STRATEGY_NAMES,
    default_rule_base,
    fuzzy_signal,
    classical_signal,
    majority_vote,
    ensemble_signal,
    indicator_panel,
    make_strategy,
)
from fuzzy_fx.analytics import profit_factor, max_drawdown, drawdown_series
from fuzzy_fx.backtest import (
    Direction,
    ExitReason,
    Trade,
    EquityPoint,
    BacktestReport,
    run_backtest,
)
from fuzzy_fx.compare import ComparisonResult, compare_strategies
from fuzzy_fx.api import backtest, compare, indicators, metrics

__all__ = [
    "__version__",
    # Errors
    "FuzzyFxError",
    "FuzzyFxDataError",
    "FuzzyFxComputeError",
    "FuzzyFxConfigError",
    "MissingColumnError",
    "MalformedRowError",
    "NonMonotonicTimestampError",
    "EmptySeriesError",
    "InsufficientDataError",
    "InsufficientHistoryError",
    "NoRuleFiredError",
    "InvariantViolationError",
    # Market data
    "Candle",
    "CandleSeries",
    "parse_candles",
    "read_candles",
    # Indicators
    "IndicatorSeries",
    "sma",
    "rsi",
    "cci",
    "stochastic",
    # Fuzzy engine
    "Term",
    "MembershipFunction",
    "TermSet",
    "FuzzyRule",
    "FuzzyVerdict",
    "FuzzySystem",
    "membership",
    "fuzzify",
    "fire_rule",
    "infer",
    # Config
    "StrategyConfig",
    "BacktestConfig",
    "RunManifest",
    "load_config",
    # Strategy
    "TradeSignal",
    "IndicatorKind",
    "Strategy",
    "EnsembleStrategy",
    "FuzzyStrategy",
    "ClassicalStrategy",
    "STRATEGY_NAMES",
    "default_rule_base",
    "fuzzy_signal",
    "classical_signal",
    "majority_vote",
    "ensemble_signal",
    "indicator_panel",
    "make_strategy",
    # Backtest
    "profit_factor",
    "max_drawdown",
    "drawdown_series",
    "Direction",
    "ExitReason",
    "Trade",
    "EquityPoint",
    "BacktestReport",
    "run_backtest",
    "ComparisonResult",
    "compare_strategies",
    # One-call API
    "backtest",
    "compare",
    "indicators",
    "metrics",
]
