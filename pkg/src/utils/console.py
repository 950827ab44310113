import logging
import os
from typing import Optional

import click
from colorama import Fore, Style, init

from ..config import Config

# Initialize colorama for Windows compatibility
init()

LEVEL_COLORS = {
    logging.DEBUG: Fore.CYAN,
    logging.INFO: Fore.GREEN,
    logging.WARNING: Fore.YELLOW,
    logging.ERROR: Fore.RED,
    logging.CRITICAL: Fore.RED,
}


class ClickEchoHandler(logging.Handler):
    """Logging handler that prints colored records through click.echo."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            color = LEVEL_COLORS.get(record.levelno, "")
            click.echo(f"{color}{self.format(record)}{Style.RESET_ALL}", err=True)
        except Exception:
            self.handleError(record)


def resolve_level(value: Optional[str]) -> int:
    """Map a level name (case-insensitive) to a logging level; unknown names give INFO."""
    name = (value or Config.DEFAULT_LOG_LEVEL).strip().upper()
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.INFO


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Route the package's log records to the terminal.

    Args:
        level: Level name; read from the CARGO_RM_LOG environment variable when omitted

    Returns:
        logging.Logger: The package root logger
    """
    root = logging.getLogger("src")
    root.setLevel(resolve_level(level if level is not None else os.environ.get(Config.LOG_ENV_VAR)))
    if not any(isinstance(h, ClickEchoHandler) for h in root.handlers):
        handler = ClickEchoHandler()
        handler.setFormatter(logging.Formatter("[%(levelname)s] %(name)s: %(message)s"))
        root.addHandler(handler)
    root.propagate = False
    return root


def success(message: str) -> None:
    click.echo(f"{Fore.GREEN}{message}{Style.RESET_ALL}")


def info(message: str) -> None:
    click.echo(f"{Fore.CYAN}{message}{Style.RESET_ALL}")


def error(message: str) -> None:
    click.echo(f"\n{Fore.RED}Error: {message}{Style.RESET_ALL}", err=True)
