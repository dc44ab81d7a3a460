"""
Logging for digitdim.

All diagnostics go to stderr through the ``digitdim`` logger so stdout can
carry machine-readable results only. Levels follow the names used by the
set_log_level/get_log_level API: TRACE, DEBUG, INFO, WARN, ERROR.
"""

import logging
import os
import sys

TRACE = 5
logging.addLevelName(TRACE, "TRACE")

LOG_LEVELS = {
    "TRACE": TRACE,
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARN": logging.WARNING,
    "ERROR": logging.ERROR,
}

DEFAULT_LOG_LEVEL = "WARN"
LOG_LEVEL_ENV = "DIGITDIM_LOG_LEVEL"

_ROOT = logging.getLogger("digitdim")
_ROOT.propagate = False


def _install_handler():
    if _ROOT.handlers:
        return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[digitdim] %(levelname)s %(message)s"))
    _ROOT.addHandler(handler)


def get_logger(name: str) -> logging.Logger:
    """Child logger of the package logger (``digitdim.<name>``)"""
    _install_handler()
    if name.startswith("digitdim"):
        return logging.getLogger(name)
    return _ROOT.getChild(name)


def set_log_level(level: str) -> None:
    """
    Set the package log level.

    Raises:
        ValueError: unknown level name
    """
    key = level.upper()
    if key not in LOG_LEVELS:
        raise ValueError(
            f"Invalid log level '{level}'. Expected one of: {', '.join(LOG_LEVELS)}"
        )
    _install_handler()
    _ROOT.setLevel(LOG_LEVELS[key])


def get_log_level() -> str:
    """Current package log level name"""
    current = _ROOT.getEffectiveLevel()
    for name, value in LOG_LEVELS.items():
        if value == current:
            return name
    return logging.getLevelName(current)


def trace(logger: logging.Logger, message: str, *args) -> None:
    if logger.isEnabledFor(TRACE):
        logger.log(TRACE, message, *args)


_env_level = os.environ.get(LOG_LEVEL_ENV, "").upper()
set_log_level(_env_level if _env_level in LOG_LEVELS else DEFAULT_LOG_LEVEL)
