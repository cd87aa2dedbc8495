# Fuzzy-FX Config Module: Strategy and backtest settings
from __future__ import annotations

import sys
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from fuzzy_fx.exceptions import FuzzyFxConfigError
from fuzzy_fx.fuzzy_engine import (
    RULES_PER_SYSTEM,
    FuzzyRule,
    MembershipFunction,
    Term,
    TermSet,
)
from fuzzy_fx.logger import get_logger

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = get_logger(__name__)

STANDARD_LOT = 100_000.0

Trapezoid = tuple[float, float, float, float]

DEFAULT_RULES: tuple[str, ...] = (
    "B,B,B->B",
    "S,S,S->S",
    "N,N,N->N",
    "B,B,N->B",
    "B,N,B->B",
    "N,B,B->B",
    "S,S,N->S",
    "S,N,S->S",
    "N,S,S->S",
    "B,B,S->N",
    "S,S,B->N",
    "B,S,N->N",
)


class _Settings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class TermSetConfig(_Settings):
    """Domain and buy/neutral/sell trapezoid breakpoints of one fuzzy variable."""

    domain: tuple[float, float]
    buy: Trapezoid
    neutral: Trapezoid
    sell: Trapezoid

    @model_validator(mode="after")
    def _check_term_set(self) -> TermSetConfig:
        self.to_term_set()
        return self

    def to_term_set(self) -> TermSet:
        return TermSet(
            domain_min=self.domain[0],
            domain_max=self.domain[1],
            terms={
                Term.BUY: MembershipFunction(*self.buy),
                Term.NEUTRAL: MembershipFunction(*self.neutral),
                Term.SELL: MembershipFunction(*self.sell),
            },
        )


class TermSets(_Settings):
    rsi: TermSetConfig = TermSetConfig(
        domain=(0.0, 100.0),
        buy=(0.0, 0.0, 25.0, 40.0),
        neutral=(25.0, 40.0, 60.0, 75.0),
        sell=(60.0, 75.0, 100.0, 100.0),
    )
    cci: TermSetConfig = TermSetConfig(
        domain=(-250.0, 250.0),
        buy=(-250.0, -250.0, -150.0, -80.0),
        neutral=(-150.0, -80.0, 80.0, 150.0),
        sell=(80.0, 150.0, 250.0, 250.0),
    )
    sto: TermSetConfig = TermSetConfig(
        domain=(0.0, 100.0),
        buy=(0.0, 0.0, 15.0, 30.0),
        neutral=(15.0, 30.0, 70.0, 85.0),
        sell=(70.0, 85.0, 100.0, 100.0),
    )
    out: TermSetConfig = TermSetConfig(
        domain=(0.0, 1.0),
        buy=(0.0, 0.0, 0.2, 0.4),
        neutral=(0.3, 0.45, 0.55, 0.7),
        sell=(0.6, 0.8, 1.0, 1.0),
    )

    @field_validator("out")
    @classmethod
    def _unit_output(cls, value: TermSetConfig) -> TermSetConfig:
        if tuple(value.domain) != (0.0, 1.0):
            raise FuzzyFxConfigError(f"Output domain must be [0, 1], got {list(value.domain)}")
        return value


class SignalThresholds(_Settings):
    """Cut points on ``res``: Buy below ``buy_below``, Sell above ``sell_above``."""

    buy_below: float
    sell_above: float

    @model_validator(mode="after")
    def _ordered(self) -> SignalThresholds:
        if not 0.0 < self.buy_below <= self.sell_above < 1.0:
            raise FuzzyFxConfigError(
                f"Thresholds need 0 < buy_below <= sell_above < 1, "
                f"got {self.buy_below} / {self.sell_above}"
            )
        return self


class ThresholdSet(_Settings):
    rsi: SignalThresholds = SignalThresholds(buy_below=0.4, sell_above=0.6)
    cci: SignalThresholds = SignalThresholds(buy_below=0.4, sell_above=0.6)
    sto: SignalThresholds = SignalThresholds(buy_below=0.2, sell_above=0.8)


class ClassicalBounds(_Settings):
    """Oversold/overbought levels crossed by the classical baselines."""

    oversold: float
    overbought: float

    @model_validator(mode="after")
    def _ordered(self) -> ClassicalBounds:
        if not self.oversold < self.overbought:
            raise FuzzyFxConfigError(
                f"oversold must lie below overbought, got {self.oversold} / {self.overbought}"
            )
        return self


class ClassicalSet(_Settings):
    rsi: ClassicalBounds = ClassicalBounds(oversold=30.0, overbought=70.0)
    cci: ClassicalBounds = ClassicalBounds(oversold=-100.0, overbought=100.0)
    sto: ClassicalBounds = ClassicalBounds(oversold=20.0, overbought=80.0)


class StrategyConfig(_Settings):
    """
    Resolved strategy settings.

    Periods are ordered fastest to slowest; that order is also the antecedent order of
    every rule. ``stoch_settings`` holds ``(k_period, d_period, slowing)`` triples.
    ``classical_variant`` picks the period setting the classical baselines use.
    Frozen and hashable, so fuzzy systems built from it can be cached.
    """

    rsi_periods: tuple[int, int, int] = (9, 14, 21)
    cci_periods: tuple[int, int, int] = (9, 14, 21)
    stoch_settings: tuple[
        tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]
    ] = ((5, 3, 3), (14, 7, 7), (21, 14, 14))
    thresholds: ThresholdSet = ThresholdSet()
    terms: TermSets = TermSets()
    rules: tuple[str, ...] = DEFAULT_RULES
    classical: ClassicalSet = ClassicalSet()
    classical_variant: int = Field(default=1, ge=0, le=2)
    defuzz_resolution: int = Field(default=1001, ge=2)

    @field_validator("rsi_periods", "cci_periods")
    @classmethod
    def _positive_periods(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(p < 1 for p in value):
            raise FuzzyFxConfigError(f"Periods must be >= 1, got {list(value)}")
        return value

    @field_validator("stoch_settings")
    @classmethod
    def _positive_settings(cls, value: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
        if any(p < 1 for setting in value for p in setting):
            raise FuzzyFxConfigError(
                f"Stochastic settings must be >= 1, got {[list(s) for s in value]}"
            )
        return value

    @field_validator("rules")
    @classmethod
    def _valid_rule_base(cls, value: tuple[str, ...]) -> tuple[str, ...]:
        parsed = [FuzzyRule.parse(text) for text in value]
        if len(parsed) != RULES_PER_SYSTEM:
            raise FuzzyFxConfigError(
                f"Rule base needs exactly {RULES_PER_SYSTEM} rules, got {len(parsed)}"
            )
        if len({rule.antecedent for rule in parsed}) != len(parsed):
            raise FuzzyFxConfigError("Rule base has duplicate antecedents")
        return tuple(str(rule) for rule in parsed)

    def rule_base(self) -> list[FuzzyRule]:
        return [FuzzyRule.parse(text) for text in self.rules]


class BacktestConfig(_Settings):
    """Account and execution settings; ``pip_value`` is per pip per standard lot."""

    initial_capital: float = Field(default=10000.0, gt=0)
    lot_size: float = Field(default=100000.0, gt=0)
    pip: float = Field(default=0.0001, gt=0)
    pip_value: float = Field(default=10.0, gt=0)
    spread_pips: float = Field(default=0.0, ge=0)
    stop_loss_pips: Optional[float] = Field(default=None, gt=0)
    take_profit_pips: Optional[float] = Field(default=None, gt=0)

    @property
    def lots(self) -> float:
        return self.lot_size / STANDARD_LOT

    @property
    def half_spread(self) -> float:
        """Half the spread, in price units."""
        return self.spread_pips * self.pip / 2.0


class RunManifest(_Settings):
    """Everything needed to reproduce a report from its data file."""

    command: Literal["backtest", "compare", "indicators"]
    data_path: str
    config_path: Optional[str] = None
    version: str
    strategy: StrategyConfig
    backtest: BacktestConfig


def _merge(defaults: dict[str, Any], overrides: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    merged = dict(defaults)
    for key, value in overrides.items():
        dotted = f"{prefix}{key}"
        if key not in defaults:
            logger.error(f"Unknown configuration key '{dotted}'")
            raise FuzzyFxConfigError(f"Unknown configuration key '{dotted}'")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise FuzzyFxConfigError(f"Configuration key '{dotted}' must be a table")
            merged[key] = _merge(defaults[key], value, f"{dotted}.")
        else:
            merged[key] = value
    return merged


def _validated(model: type[_Settings], data: dict[str, Any], section: str = "") -> Any:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = section + ".".join(str(part) for part in first["loc"])
        message = f"Invalid configuration value for '{key or model.__name__}': {first['msg']}"
        logger.error(message)
        raise FuzzyFxConfigError(message) from e


def parse_config(document: dict[str, Any]) -> tuple[StrategyConfig, BacktestConfig]:
    """Resolve a parsed TOML document against the defaults."""
    document = dict(document)
    backtest = document.pop("backtest", {})
    if not isinstance(backtest, dict):
        raise FuzzyFxConfigError("Configuration key 'backtest' must be a table")

    strategy_data = _merge(StrategyConfig().model_dump(), document)
    backtest_data = _merge(BacktestConfig().model_dump(), backtest, "backtest.")
    return (
        _validated(StrategyConfig, strategy_data),
        _validated(BacktestConfig, backtest_data, "backtest."),
    )


def load_config(path: Union[str, Path]) -> tuple[StrategyConfig, BacktestConfig]:
    """
    Load strategy and backtest settings from a TOML file.

    Strategy keys are top level (``rsi_periods = [9, 14, 21]``,
    ``terms.rsi.buy = [0, 0, 25, 40]``); backtest keys live under ``backtest.``.
    Keys left out keep their defaults.

    Raises:
        FuzzyFxConfigError: unreadable file, invalid TOML, unknown key or invalid value.
    """
    path = Path(path)
    try:
        with path.open("rb") as f:
            document = tomllib.load(f)
    except OSError as e:
        logger.error(f"Cannot read config file {path}: {e}")
        raise FuzzyFxConfigError(f"Cannot read config file {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        logger.error(f"Invalid TOML in {path}: {e}")
        raise FuzzyFxConfigError(f"Invalid TOML in {path}: {e}") from e

    strategy, backtest = parse_config(document)
    logger.debug(f"Loaded configuration from {path}")
    return strategy, backtest
