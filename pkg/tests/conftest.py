from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from fuzzy_fx.config import BacktestConfig, StrategyConfig
from fuzzy_fx.market_data import Candle, CandleSeries, read_candles

DATA_DIR = Path(__file__).parent / "data"


def make_candles(opens, closes=None, highs=None, lows=None, symbol="TEST", start="2022-01-03"):
    """Hourly candles; closes default to opens, highs/lows to the open-close envelope."""
    opens = np.asarray(opens, dtype=float)
    closes = opens.copy() if closes is None else np.asarray(closes, dtype=float)
    highs = np.maximum(opens, closes) if highs is None else np.asarray(highs, dtype=float)
    lows = np.minimum(opens, closes) if lows is None else np.asarray(lows, dtype=float)
    stamps = pd.date_range(start, periods=len(opens), freq="h", tz="UTC")
    return CandleSeries.from_candles(
        symbol,
        [
            Candle(ts, o, h, lo, c, 1000.0)
            for ts, o, h, lo, c in zip(stamps, opens, highs, lows, closes)
        ],
    )


def random_walk(n, seed=7, start=1.1, step=0.0008):
    """Positive OHLC random walk with opens at the previous close."""
    rng = np.random.default_rng(seed)
    closes = start * np.exp(np.cumsum(rng.normal(0.0, step, n)))
    opens = np.concatenate([[start], closes[:-1]])
    wick = np.abs(rng.normal(0.0, step / 2, n)) * start
    highs = np.maximum(opens, closes) + wick
    lows = np.minimum(opens, closes) - wick
    return make_candles(opens, closes, highs, lows, symbol="WALK")


@pytest.fixture
def flat_candles():
    return read_candles(DATA_DIR / "flat.csv")


@pytest.fixture
def trending_candles():
    return read_candles(DATA_DIR / "trending.csv")


@pytest.fixture
def oversold_candles():
    return read_candles(DATA_DIR / "oversold.csv")


@pytest.fixture
def walk_candles():
    return random_walk(200)


@pytest.fixture
def strategy_cfg():
    return StrategyConfig()


@pytest.fixture
def backtest_cfg():
    return BacktestConfig()
