# Fuzzy-FX Logging Module
from __future__ import annotations

import logging
from typing import Union

from rich.console import Console
from rich.logging import RichHandler

# Logs and summaries go to stderr; stdout is reserved for JSON reports.
console = Console(stderr=True)

_ROOT = "fuzzy_fx"


def get_logger(name: str) -> logging.Logger:
    """
    Get a pre-configured structured logger.

    Args:
        name: Name of the logger, typically __name__.

    Returns:
        logging.Logger: Logger attached to the package's rich handler.
    """
    root = logging.getLogger(_ROOT)

    if not root.handlers:
        root.setLevel(logging.INFO)
        handler = RichHandler(
            console=console, rich_tracebacks=True, show_time=False, show_path=False, markup=False
        )
        root.addHandler(handler)

    if name == _ROOT or name.startswith(_ROOT + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{_ROOT}.{name}")


def set_level(level: Union[int, str]) -> None:
    """Set the level of every Fuzzy-FX logger."""
    get_logger(_ROOT).setLevel(level)
