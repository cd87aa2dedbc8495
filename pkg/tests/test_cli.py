import json

import numpy as np
import pandas as pd
import pytest

from conftest import DATA_DIR, random_walk
from fuzzy_fx import cli
from fuzzy_fx.config import StrategyConfig
from fuzzy_fx.market_data import read_candles
from fuzzy_fx.strategy import indicator_panel

REPORT_KEYS = [
    "strategy",
    "symbol",
    "bars",
    "trade_count",
    "win_count",
    "net_profit",
    "gross_profit",
    "gross_loss",
    "profit_factor",
    "max_drawdown",
    "final_capital",
    "manifest",
]


@pytest.fixture
def walk_csv(tmp_path):
    path = tmp_path / "eurusd.csv"
    path.write_text(random_walk(100).to_csv(), encoding="utf-8")
    return path


def test_backtest_prints_json_report(capsys):
    code = cli.main(["backtest", "--data", str(DATA_DIR / "trending.csv"), "--quiet"])
    assert code == cli.EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert list(report) == REPORT_KEYS
    assert report["strategy"] == "ensemble"
    assert report["symbol"] == "TRENDING"
    assert report["trade_count"] >= 1
    assert report["manifest"]["command"] == "backtest"
    assert report["manifest"]["strategy"]["rsi_periods"] == [9, 14, 21]


def test_backtest_writes_artifacts(walk_csv, tmp_path, capsys):
    out = tmp_path / "reports" / "report.json"
    equity = tmp_path / "equity.csv"
    trades = tmp_path / "trades.csv"
    code = cli.main(
        [
            "backtest",
            "--data",
            str(walk_csv),
            "--strategy",
            "rsi-classic",
            "--symbol",
            "EURUSD",
            "--out",
            str(out),
            "--equity-csv",
            str(equity),
            "--trades-csv",
            str(trades),
        ]
    )
    assert code == cli.EXIT_OK
    assert capsys.readouterr().out == ""

    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["symbol"] == "EURUSD"
    assert report["strategy"] == "rsi-classic"

    equity_lines = equity.read_text(encoding="utf-8").splitlines()
    assert equity_lines[0] == "bar,timestamp,equity"
    assert len(equity_lines) == 1 + 100 - 15
    assert equity_lines[1].startswith("15,2022-01-03T15:00:00Z,")

    trade_lines = trades.read_text(encoding="utf-8").splitlines()
    assert trade_lines[0] == "direction,entry_bar,exit_bar,entry_price,exit_price,pnl,exit_reason"
    assert len(trade_lines) == 1 + report["trade_count"]


def test_compare_lists_four_reports(walk_csv, capsys):
    assert cli.main(["compare", "--data", str(walk_csv), "--quiet"]) == cli.EXIT_OK
    reports = json.loads(capsys.readouterr().out)
    assert [r["strategy"] for r in reports] == ["ensemble", "rsi-classic", "cci-classic", "sto-classic"]
    assert all(r["manifest"]["command"] == "compare" for r in reports)


def test_indicators_csv(walk_csv, tmp_path):
    out = tmp_path / "indicators.csv"
    assert cli.main(["indicators", "--data", str(walk_csv), "--out", str(out), "-q"]) == 0

    lines = out.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    assert header[:2] == ["bar", "timestamp"]
    assert len(header) == 11
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 100

    for column, lookback in (("rsi_9", 9), ("rsi_14", 14), ("rsi_21", 21)):
        i = header.index(column)
        assert all(row[i] == "" for row in rows[:lookback])
        assert all(row[i] != "" for row in rows[lookback:])


def test_indicators_on_flat_market(tmp_path):
    out = tmp_path / "flat_indicators.csv"
    assert cli.main(["indicators", "--data", str(DATA_DIR / "flat.csv"), "--out", str(out), "-q"]) == 0
    last = out.read_text(encoding="utf-8").splitlines()[-1].split(",")
    assert last[0] == "119"
    assert last[2:] == ["50.0"] * 3 + ["0.0"] * 3 + ["50.0"] * 3


def test_missing_data_file_is_an_input_error(tmp_path, capsys):
    missing = tmp_path / "nowhere.csv"
    assert cli.main(["backtest", "--data", str(missing)]) == cli.EXIT_INPUT
    # Rich folds long paths across lines
    assert "nowhere.csv" in "".join(capsys.readouterr().err.split())


def test_malformed_data_is_an_input_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,open,high,low,close\n2022-01-03T00:00:00Z,1,1,1,1\n")
    assert cli.main(["compare", "--data", str(path), "-q"]) == cli.EXIT_INPUT


def test_short_data_is_an_input_error(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text(random_walk(30).to_csv(), encoding="utf-8")
    assert cli.main(["backtest", "--data", str(path), "-q"]) == cli.EXIT_INPUT


def test_unreadable_config_is_an_input_error(walk_csv, tmp_path):
    code = cli.main(
        ["backtest", "--data", str(walk_csv), "--config", str(tmp_path / "absent.toml"), "-q"]
    )
    assert code == cli.EXIT_INPUT


def test_invalid_config_is_an_input_error(walk_csv, tmp_path):
    config = tmp_path / "bad.toml"
    config.write_text("classical_variant = 7\n", encoding="utf-8")
    assert cli.main(["backtest", "--data", str(walk_csv), "--config", str(config)]) == 2


def test_config_reaches_the_manifest(walk_csv, tmp_path, capsys):
    config = tmp_path / "fx.toml"
    config.write_text("[backtest]\nspread_pips = 2.0\n", encoding="utf-8")
    args = ["backtest", "--data", str(walk_csv), "--config", str(config), "-q"]
    assert cli.main(args) == 0
    manifest = json.loads(capsys.readouterr().out)["manifest"]
    assert manifest["config_path"] == str(config)
    assert manifest["backtest"]["spread_pips"] == 2.0


@pytest.mark.parametrize(
    "argv",
    [
        ["backtest", "--data", "x.csv", "--strategy", "bogus"],
        ["backtest"],
        ["indicators", "--data", "x.csv"],
        ["compare", "--data", "x.csv", "-q", "-v"],
        ["optimize", "--data", "x.csv"],
    ],
)
def test_usage_errors_exit_with_one(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == cli.EXIT_USAGE


def test_no_command_prints_help():
    assert cli.main([]) == cli.EXIT_USAGE


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert "fuzzy-fx 1.0.0" in capsys.readouterr().out


def test_indicators_csv_round_trips(walk_csv, tmp_path):
    out = tmp_path / "indicators.csv"
    assert cli.main(["indicators", "--data", str(walk_csv), "--out", str(out), "-q"]) == 0

    written = pd.read_csv(out, index_col="bar").drop(columns="timestamp")
    expected = indicator_panel(read_candles(walk_csv), StrategyConfig()).to_frame()
    assert list(written.columns) == list(expected.columns)
    assert np.allclose(written.to_numpy(), expected.to_numpy(), atol=1e-9, equal_nan=True)


def test_bogus_strategy_lists_valid_names(capsys):
    with pytest.raises(SystemExit):
        cli.main(["backtest", "--data", "x.csv", "--strategy", "bogus"])
    err = capsys.readouterr().err
    assert "rsi-fuzzy" in err and "sto-classic" in err
