#  Copyright (c) 2025.  ftfgates
#     _____  __    _____
#    / __/ |/ /__ / __/__ ____ _/ /____ ___
#   / _//    / -_) _// _ `/ _ `/ __/ -_|_-<
#  /_/ /_/|_/\__/_/  \_, /\_,_/\__/\__/___/
#                   /___/
#  MIT License
#

import logging

from rich.console import Console
from rich.logging import RichHandler

from ..version import __software__

LOG_FORMAT = "%(name)s: %(message)s"

stderr_console = Console(stderr=True)
console = Console()


def setup_logging(verbose: bool = False, debug: bool = False) -> logging.Logger:
    """
    Install a single rich handler on the package logger.

    :param verbose: log INFO messages.
    :param debug: log DEBUG messages and render rich tracebacks.
    :return: the package logger.
    """
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logger = logging.getLogger(__software__)
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(console=stderr_console, rich_tracebacks=debug, show_path=debug)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
    return logger
