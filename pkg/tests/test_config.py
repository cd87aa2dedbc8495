import pytest

from fuzzy_fx.config import (
    DEFAULT_RULES,
    BacktestConfig,
    StrategyConfig,
    TermSetConfig,
    load_config,
    parse_config,
)
from fuzzy_fx.exceptions import FuzzyFxConfigError


@pytest.fixture
def write_toml(tmp_path):
    def _write(text):
        path = tmp_path / "fuzzy_fx.toml"
        path.write_text(text, encoding="utf-8")
        return path

    return _write


def test_defaults():
    cfg = StrategyConfig()
    assert cfg.rsi_periods == (9, 14, 21)
    assert cfg.stoch_settings[1] == (14, 7, 7)
    assert cfg.thresholds.sto.buy_below == 0.2
    assert cfg.classical.cci.oversold == -100.0
    assert cfg.classical_variant == 1
    assert len(cfg.rule_base()) == 12

    bt = BacktestConfig()
    assert bt.initial_capital == 10000.0
    assert bt.lots == 1.0
    assert bt.half_spread == 0.0
    assert bt.stop_loss_pips is None


def test_partial_override_keeps_defaults(write_toml):
    path = write_toml(
        """
rsi_periods = [7, 14, 28]
terms.rsi.buy = [0, 0, 20, 35]
thresholds.sto = { buy_below = 0.25, sell_above = 0.75 }

[backtest]
spread_pips = 1.5
stop_loss_pips = 30
"""
    )
    strategy, backtest = load_config(path)
    assert strategy.rsi_periods == (7, 14, 28)
    assert strategy.cci_periods == (9, 14, 21)
    assert strategy.terms.rsi.buy == (0.0, 0.0, 20.0, 35.0)
    assert strategy.terms.rsi.neutral == (25.0, 40.0, 60.0, 75.0)
    assert strategy.thresholds.sto.sell_above == 0.75
    assert strategy.thresholds.rsi.buy_below == 0.4
    assert backtest.spread_pips == 1.5
    assert backtest.half_spread == pytest.approx(0.000075)
    assert backtest.stop_loss_pips == 30.0
    assert backtest.take_profit_pips is None
    assert backtest.initial_capital == 10000.0


def test_rule_text_is_normalized():
    strategy, _ = parse_config({"rules": [rule.lower() for rule in DEFAULT_RULES]})
    assert strategy.rules == DEFAULT_RULES


@pytest.mark.parametrize(
    "document, key",
    [
        ({"bogus": 1}, "bogus"),
        ({"terms": {"rsi": {"middle": [1, 2, 3, 4]}}}, "terms.rsi.middle"),
        ({"backtest": {"slippage": 2}}, "backtest.slippage"),
    ],
)
def test_unknown_keys_are_named(document, key):
    with pytest.raises(FuzzyFxConfigError, match=key.replace(".", r"\.")):
        parse_config(document)


@pytest.mark.parametrize(
    "document",
    [
        {"rsi_periods": [9, 0, 21]},
        {"stoch_settings": [[5, 3, 3], [14, 7, 0], [21, 14, 14]]},
        {"classical_variant": 3},
        {"defuzz_resolution": 1},
        {"thresholds": {"rsi": {"buy_below": 0.7}}},
        {"classical": {"rsi": {"oversold": 80}}},
        {"terms": {"rsi": {"buy": [0, 0, 50, 40]}}},
        {"terms": {"rsi": {"buy": [0, 0, 10, 15]}}},
        {"terms": {"out": {"domain": [0, 2]}}},
        {"rules": list(DEFAULT_RULES[:11])},
        {"rules": list(DEFAULT_RULES[:11]) + ["B,B,B->S"]},
        {"rules": list(DEFAULT_RULES[:11]) + ["B,B,X->N"]},
        {"backtest": {"spread_pips": -1}},
        {"backtest": {"initial_capital": 0}},
        {"backtest": {"stop_loss_pips": 0}},
        {"backtest": 5},
        {"terms": 5},
    ],
)
def test_invalid_values_rejected(document):
    with pytest.raises(FuzzyFxConfigError):
        parse_config(document)


def test_invalid_value_message_names_the_key():
    with pytest.raises(FuzzyFxConfigError, match=r"backtest\.spread_pips"):
        parse_config({"backtest": {"spread_pips": -1}})


def test_missing_file(tmp_path):
    with pytest.raises(FuzzyFxConfigError, match="missing.toml"):
        load_config(tmp_path / "missing.toml")


def test_invalid_toml(write_toml):
    with pytest.raises(FuzzyFxConfigError, match="Invalid TOML"):
        load_config(write_toml("rsi_periods = [9, 14"))


def test_term_set_config_builds_term_set():
    ts = TermSetConfig(
        domain=(0, 100), buy=(0, 0, 25, 40), neutral=(25, 40, 60, 75), sell=(60, 75, 100, 100)
    ).to_term_set()
    assert ts.midpoint == 50.0
    assert ts.reflect(10.0) == 90.0


def test_configs_are_hashable_and_frozen():
    assert hash(StrategyConfig()) == hash(StrategyConfig())
    assert StrategyConfig(classical_variant=0) != StrategyConfig()
    with pytest.raises(Exception):
        StrategyConfig().classical_variant = 2
