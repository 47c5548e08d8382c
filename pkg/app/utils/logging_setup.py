"""Logging configuration shared by the CLI and the HTTP application"""
import logging
import sys

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: str = "INFO") -> None:
    """
    Install a single stderr handler on the root logger.

    stdout is reserved for JSON/CSV results, so log lines never mix with them.
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_stratmon", False):
            root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._stratmon = True
    root.addHandler(handler)
    root.setLevel(getattr(logging, level.upper(), logging.INFO))
