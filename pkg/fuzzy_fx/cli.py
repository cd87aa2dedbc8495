# Fuzzy-FX CLI Module: Command-line interface
from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, NoReturn, Optional, Sequence

from rich.markup import escape
from rich.table import Table

from fuzzy_fx import __version__, api
from fuzzy_fx.analytics import (
    DEFAULT_DRAWDOWN_LIMIT,
    compute_metrics,
    format_metrics,
    within_drawdown_limit,
)
from fuzzy_fx.backtest import BacktestReport
from fuzzy_fx.exceptions import FuzzyFxError, InvariantViolationError
from fuzzy_fx.export import (
    comparison_json,
    equity_csv,
    indicators_csv,
    report_json,
    trades_csv,
    write_text,
)
from fuzzy_fx.logger import console, get_logger, set_level
from fuzzy_fx.strategy import STRATEGY_NAMES

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with EXIT_USAGE."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--data", required=True, help="OHLCV CSV file")
    common.add_argument("--config", help="TOML configuration file")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument(
        "-q", "--quiet", action="store_true", help="Only warnings and errors, no summary table"
    )

    parser = _Parser(
        prog="fuzzy-fx",
        description=f"Fuzzy-FX forex backtesting CLI v{__version__}",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"fuzzy-fx {__version__}")

    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    # Backtest command
    backtest_parser = subparsers.add_parser(
        "backtest", parents=[common], help="Backtest one strategy"
    )
    backtest_parser.add_argument(
        "--strategy", default="ensemble", choices=STRATEGY_NAMES, help="Strategy to run"
    )
    backtest_parser.add_argument("--symbol", help="Symbol recorded in the report")
    backtest_parser.add_argument("--out", help="JSON report path (default: standard output)")
    backtest_parser.add_argument("--equity-csv", help="Write the equity curve to this CSV")
    backtest_parser.add_argument("--trades-csv", help="Write the trade list to this CSV")

    # Compare command
    compare_parser = subparsers.add_parser(
        "compare", parents=[common], help="Compare the ensemble with the classical baselines"
    )
    compare_parser.add_argument("--symbol", help="Symbol recorded in the reports")
    compare_parser.add_argument("--out", help="JSON report path (default: standard output)")
    compare_parser.add_argument(
        "--drawdown-limit",
        type=float,
        default=DEFAULT_DRAWDOWN_LIMIT,
        help="Drawdown bound shown in the summary table",
    )

    # Indicators command
    indicators_parser = subparsers.add_parser(
        "indicators", parents=[common], help="Dump every indicator variant per bar"
    )
    indicators_parser.add_argument("--out", required=True, help="CSV output path")

    return parser


def _summary_table(
    title: str, reports: Sequence[BacktestReport], limit: float = DEFAULT_DRAWDOWN_LIMIT
) -> Table:
    table = Table(title=title, show_header=True, header_style="bold magenta")
    table.add_column("Strategy", style="cyan", no_wrap=True)
    table.add_column("Profit Factor", justify="right", style="green")
    table.add_column("Net Profit", justify="right")
    table.add_column("Gross Profit", justify="right")
    table.add_column("Gross Loss", justify="right")
    table.add_column("Max DD", justify="right", style="red")
    table.add_column("Trades", justify="right")
    table.add_column("Win Rate", justify="right")

    for r in reports:
        m = format_metrics(compute_metrics(r))
        dd = m["max_drawdown"]
        if not within_drawdown_limit(r.max_drawdown, limit):
            dd = f"[bold]{dd} > {limit * 100:.0f}%[/bold]"
        table.add_row(
            r.strategy,
            m["profit_factor"],
            m["net_profit"],
            m["gross_profit"],
            m["gross_loss"],
            dd,
            m["trade_count"],
            m["win_rate"],
        )
    return table


def cmd_backtest(args: argparse.Namespace) -> int:
    report, manifest = api.backtest(args.data, args.strategy, args.config, args.symbol)

    saved = write_text(report_json(report, manifest), args.out)
    if args.equity_csv:
        write_text(equity_csv(report), args.equity_csv)
    if args.trades_csv:
        write_text(trades_csv(report), args.trades_csv)

    if not args.quiet:
        console.print(_summary_table(f"Backtest: {report.symbol}", [report]))
        if saved:
            console.print(f"[bold green]SUCCESS:[/bold green] Report saved to {escape(saved)}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    result, manifest = api.compare(args.data, args.config, args.symbol)

    saved = write_text(comparison_json(result, manifest), args.out)

    if not args.quiet:
        title = f"Strategy comparison: {result.symbol}"
        console.print(_summary_table(title, result.reports, args.drawdown_limit))
        if saved:
            console.print(f"[bold green]SUCCESS:[/bold green] Report saved to {escape(saved)}")
    return EXIT_OK


def cmd_indicators(args: argparse.Namespace) -> int:
    panel, candles, _ = api.indicators(args.data, args.config)
    saved = write_text(indicators_csv(panel, candles), args.out)
    if not args.quiet:
        console.print(
            f"[bold green]SUCCESS:[/bold green] {len(candles)} bars written to {escape(str(saved))}"
        )
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "backtest": cmd_backtest,
    "compare": cmd_compare,
    "indicators": cmd_indicators,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    if args.verbose:
        set_level(logging.DEBUG)
    elif args.quiet:
        set_level(logging.WARNING)
    else:
        set_level(logging.INFO)

    try:
        return COMMANDS[args.command](args)
    except InvariantViolationError as e:
        console.print(f"[bold red]INTERNAL ERROR:[/bold red] {escape(str(e))}")
        return EXIT_INTERNAL
    except FuzzyFxError as e:
        console.print(f"[bold red]ERROR:[/bold red] {escape(str(e))}")
        return EXIT_INPUT
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
