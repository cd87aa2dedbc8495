# Fuzzy-FX Strategy Module: Fuzzy, classical and ensemble trade signals
from __future__ import annotations

from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Iterable, Optional, Sequence

import pandas as pd

from fuzzy_fx.config import DEFAULT_RULES, SignalThresholds, StrategyConfig
from fuzzy_fx.exceptions import FuzzyFxConfigError, InsufficientHistoryError, NoRuleFiredError
from fuzzy_fx.fuzzy_engine import FuzzyRule, FuzzySystem, FuzzyVerdict
from fuzzy_fx.indicators import (
    IndicatorSeries,
    cci,
    cci_lookback,
    rsi,
    rsi_lookback,
    stochastic,
    stochastic_lookback,
)
from fuzzy_fx.logger import get_logger
from fuzzy_fx.market_data import CandleSeries

logger = get_logger(__name__)


class TradeSignal(str, Enum):
    BUY = "Buy"
    SELL = "Sell"
    NEUTRAL = "Neutral"

    def mirrored(self) -> TradeSignal:
        if self is TradeSignal.BUY:
            return TradeSignal.SELL
        if self is TradeSignal.SELL:
            return TradeSignal.BUY
        return self


class IndicatorKind(str, Enum):
    RSI = "RSI"
    CCI = "CCI"
    STO = "STO"

    @property
    def key(self) -> str:
        return self.value.lower()


def default_rule_base() -> list[FuzzyRule]:
    """The 12 rules shared by all three fuzzy systems, inputs fastest period first."""
    return [FuzzyRule.parse(text) for text in DEFAULT_RULES]


@lru_cache(maxsize=32)
def build_system(kind: IndicatorKind, cfg: StrategyConfig) -> FuzzySystem:
    """The fuzzy system of one indicator; all three inputs share its term set."""
    term_set = getattr(cfg.terms, kind.key).to_term_set()
    return FuzzySystem(
        input_term_sets=(term_set, term_set, term_set),
        output_term_set=cfg.terms.out.to_term_set(),
        rules=tuple(cfg.rule_base()),
        resolution=cfg.defuzz_resolution,
        name=f"{kind.value} fuzzy system",
    )


def classify(res: float, thresholds: SignalThresholds) -> TradeSignal:
    """Buy below ``buy_below``, Sell above ``sell_above``; both bounds are Neutral."""
    if res < thresholds.buy_below:
        return TradeSignal.BUY
    if res > thresholds.sell_above:
        return TradeSignal.SELL
    return TradeSignal.NEUTRAL


def fuzzy_signal(
    kind: IndicatorKind,
    inputs: Sequence[float],
    cfg: StrategyConfig,
) -> tuple[TradeSignal, Optional[FuzzyVerdict]]:
    """
    Infer ``res`` for the three period variants of one indicator and threshold it.

    Returns:
        (signal, verdict); the verdict is None when no rule fired, which reads Neutral.
    """
    try:
        verdict = build_system(kind, cfg).infer(inputs)
    except NoRuleFiredError:
        return TradeSignal.NEUTRAL, None
    return classify(verdict.res, getattr(cfg.thresholds, kind.key)), verdict


def classical_signal(
    kind: IndicatorKind,
    series: IndicatorSeries,
    bar: int,
    cfg: StrategyConfig,
    d_line: Optional[IndicatorSeries] = None,
) -> TradeSignal:
    """
    Crossing signal of a classical baseline.

    Buy when the value crosses up through the oversold bound between ``bar - 1`` and
    ``bar``, Sell when it crosses down through the overbought bound. For the
    stochastic, ``series`` is slow %K and %D must be defined at ``bar``.
    """
    if not (series.is_defined(bar) and series.is_defined(bar - 1)):
        raise InsufficientHistoryError(f"{series.label} needs bars {bar - 1} and {bar}")
    if kind is IndicatorKind.STO and (d_line is None or not d_line.is_defined(bar)):
        raise InsufficientHistoryError(f"Stochastic %D is undefined at bar {bar}")

    bounds = getattr(cfg.classical, kind.key)
    prev, cur = series.at(bar - 1), series.at(bar)
    if prev < bounds.oversold <= cur:
        return TradeSignal.BUY
    if prev > bounds.overbought >= cur:
        return TradeSignal.SELL
    return TradeSignal.NEUTRAL


def majority_vote(s_rsi: TradeSignal, s_cci: TradeSignal, s_sto: TradeSignal) -> TradeSignal:
    votes = Counter((s_rsi, s_cci, s_sto))
    if votes[TradeSignal.BUY] >= 2:
        return TradeSignal.BUY
    if votes[TradeSignal.SELL] >= 2:
        return TradeSignal.SELL
    return TradeSignal.NEUTRAL


def fuzzy_warmup(kind: IndicatorKind, cfg: StrategyConfig) -> int:
    """First bar at which all three variants of ``kind`` can be computed."""
    if kind is IndicatorKind.RSI:
        return max(rsi_lookback(p) for p in cfg.rsi_periods)
    if kind is IndicatorKind.CCI:
        return max(cci_lookback(p) for p in cfg.cci_periods)
    return max(stochastic_lookback(k, d, s) for k, d, s in cfg.stoch_settings)


def ensemble_warmup(cfg: StrategyConfig) -> int:
    return max(fuzzy_warmup(kind, cfg) for kind in IndicatorKind)


def classical_warmup(kind: IndicatorKind, cfg: StrategyConfig) -> int:
    """First bar with the classical indicator defined at both ``bar - 1`` and ``bar``."""
    variant = cfg.classical_variant
    if kind is IndicatorKind.RSI:
        return rsi_lookback(cfg.rsi_periods[variant]) + 1
    if kind is IndicatorKind.CCI:
        return cci_lookback(cfg.cci_periods[variant]) + 1
    k, d, s = cfg.stoch_settings[variant]
    return max(k + s - 1, stochastic_lookback(k, d, s))


@dataclass(frozen=True)
class IndicatorPanel:
    """Period variants of each indicator over one candle series."""

    bars: int
    rsi: tuple[IndicatorSeries, ...] = ()
    cci: tuple[IndicatorSeries, ...] = ()
    stoch_k: tuple[IndicatorSeries, ...] = ()
    stoch_d: tuple[IndicatorSeries, ...] = ()

    def variants(self, kind: IndicatorKind) -> tuple[IndicatorSeries, ...]:
        if kind is IndicatorKind.RSI:
            return self.rsi
        if kind is IndicatorKind.CCI:
            return self.cci
        return self.stoch_k

    def inputs_at(self, kind: IndicatorKind, bar: int) -> tuple[float, float, float]:
        values = tuple(series.at(bar) for series in self.variants(kind))
        return values  # type: ignore[return-value]

    def to_frame(self) -> pd.DataFrame:
        """One column per variant, NaN before its lookback is satisfied."""
        columns = {}
        for series in (*self.rsi, *self.cci, *self.stoch_k):
            name = "_".join([series.name.lower(), *(str(p) for p in series.params)])
            columns[name] = series.aligned(self.bars)
        frame = pd.DataFrame(columns, index=pd.RangeIndex(self.bars, name="bar"))
        return frame


def indicator_panel(
    candles: CandleSeries,
    cfg: StrategyConfig,
    kinds: Iterable[IndicatorKind] = tuple(IndicatorKind),
) -> IndicatorPanel:
    """Compute the period variants of ``kinds``; raises InsufficientDataError on short data."""
    kinds = set(kinds)
    fields: dict[str, Any] = {}
    if IndicatorKind.RSI in kinds:
        closes = candles.closes
        fields["rsi"] = tuple(rsi(closes, p) for p in cfg.rsi_periods)
    if IndicatorKind.CCI in kinds:
        fields["cci"] = tuple(cci(candles, p) for p in cfg.cci_periods)
    if IndicatorKind.STO in kinds:
        lines = [stochastic(candles, k, d, s) for k, d, s in cfg.stoch_settings]
        fields["stoch_k"] = tuple(k_line for k_line, _ in lines)
        fields["stoch_d"] = tuple(d_line for _, d_line in lines)
    return IndicatorPanel(bars=len(candles), **fields)


class Strategy(ABC):
    """
    Signal source for the backtester.

    ``generate`` evaluates every bar from ``warmup`` on over the full series;
    ``signal_at`` evaluates one bar from the candles up to it only. Indicators are
    causal, so both agree.
    """

    name: str = ""

    def __init__(self, config: Optional[StrategyConfig] = None):
        self.config = config or StrategyConfig()
        self.no_rule_fired = 0

    @property
    @abstractmethod
    def warmup(self) -> int:
        """First evaluable bar."""

    @abstractmethod
    def _prepare(self, candles: CandleSeries) -> Any:
        pass

    @abstractmethod
    def _evaluate(self, prepared: Any, bar: int) -> TradeSignal:
        pass

    def generate(self, candles: CandleSeries) -> pd.Series:
        """TradeSignals indexed by bar, empty when no bar is evaluable."""
        bars = range(self.warmup, len(candles))
        if not bars:
            return pd.Series([], index=pd.RangeIndex(0), dtype=object)
        prepared = self._prepare(candles)
        signals = [self._evaluate(prepared, bar) for bar in bars]
        if self.no_rule_fired:
            logger.debug(f"{self.name}: no rule fired on {self.no_rule_fired} bar(s)")
        return pd.Series(signals, index=pd.RangeIndex(bars.start, bars.stop), dtype=object)

    def signal_at(self, candles: CandleSeries, bar: int) -> TradeSignal:
        if not 0 <= bar < len(candles):
            raise InsufficientHistoryError(f"Bar {bar} is outside a {len(candles)}-bar series")
        if bar < self.warmup:
            raise InsufficientHistoryError(
                f"{self.name} needs {self.warmup} bars of lookback, bar {bar} has {bar}"
            )
        return self._evaluate(self._prepare(candles.head(bar + 1)), bar)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, warmup={self.warmup})"


class FuzzyStrategy(Strategy):
    """One fuzzy system fed by the three period variants of its indicator."""

    def __init__(self, kind: IndicatorKind, config: Optional[StrategyConfig] = None):
        super().__init__(config)
        self.kind = kind
        self.name = f"{kind.key}-fuzzy"

    @property
    def warmup(self) -> int:
        return fuzzy_warmup(self.kind, self.config)

    def _prepare(self, candles: CandleSeries) -> IndicatorPanel:
        return indicator_panel(candles, self.config, (self.kind,))

    def _evaluate(self, prepared: IndicatorPanel, bar: int) -> TradeSignal:
        signal, verdict = fuzzy_signal(self.kind, prepared.inputs_at(self.kind, bar), self.config)
        if verdict is None:
            self.no_rule_fired += 1
        return signal


class EnsembleStrategy(Strategy):
    """Majority vote of the RSI, CCI and stochastic fuzzy systems."""

    name = "ensemble"

    @property
    def warmup(self) -> int:
        return ensemble_warmup(self.config)

    def _prepare(self, candles: CandleSeries) -> IndicatorPanel:
        return indicator_panel(candles, self.config)

    def _evaluate(self, prepared: IndicatorPanel, bar: int) -> TradeSignal:
        signals = []
        for kind in IndicatorKind:
            signal, verdict = fuzzy_signal(kind, prepared.inputs_at(kind, bar), self.config)
            if verdict is None:
                self.no_rule_fired += 1
            signals.append(signal)
        return majority_vote(*signals)


class ClassicalStrategy(Strategy):
    """Threshold-crossing baseline on the ``classical_variant`` period setting."""

    def __init__(self, kind: IndicatorKind, config: Optional[StrategyConfig] = None):
        super().__init__(config)
        self.kind = kind
        self.name = f"{kind.key}-classic"

    @property
    def warmup(self) -> int:
        return classical_warmup(self.kind, self.config)

    def _prepare(
        self, candles: CandleSeries
    ) -> tuple[IndicatorSeries, Optional[IndicatorSeries]]:
        variant = self.config.classical_variant
        if self.kind is IndicatorKind.RSI:
            return rsi(candles.closes, self.config.rsi_periods[variant]), None
        if self.kind is IndicatorKind.CCI:
            return cci(candles, self.config.cci_periods[variant]), None
        k, d, s = self.config.stoch_settings[variant]
        return stochastic(candles, k, d, s)

    def _evaluate(
        self, prepared: tuple[IndicatorSeries, Optional[IndicatorSeries]], bar: int
    ) -> TradeSignal:
        series, d_line = prepared
        return classical_signal(self.kind, series, bar, self.config, d_line)


def ensemble_signal(candles: CandleSeries, bar: int, cfg: StrategyConfig) -> TradeSignal:
    """Ensemble signal at ``bar`` computed from candles ``0..bar`` only."""
    return EnsembleStrategy(cfg).signal_at(candles, bar)


STRATEGY_NAMES = (
    "ensemble",
    "rsi-fuzzy",
    "cci-fuzzy",
    "sto-fuzzy",
    "rsi-classic",
    "cci-classic",
    "sto-classic",
)

COMPARED_STRATEGIES = ("ensemble", "rsi-classic", "cci-classic", "sto-classic")


def make_strategy(name: str, config: Optional[StrategyConfig] = None) -> Strategy:
    if name == "ensemble":
        return EnsembleStrategy(config)
    family, _, style = name.partition("-")
    kinds = {kind.key: kind for kind in IndicatorKind}
    if family in kinds and style == "fuzzy":
        return FuzzyStrategy(kinds[family], config)
    if family in kinds and style == "classic":
        return ClassicalStrategy(kinds[family], config)
    logger.error(f"Unknown strategy '{name}'")
    raise FuzzyFxConfigError(
        f"Unknown strategy '{name}'. Valid strategies: {', '.join(STRATEGY_NAMES)}"
    )
