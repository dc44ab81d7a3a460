"""
Runtime configuration.

Resolution order: built-in defaults, then an optional TOML file with a
``[digitdim]`` table, then environment variables, then explicit overrides
(the CLI flags).

Example config file::

    [digitdim]
    precision = 192
    jobs = 4
    guard = "1e-10"
    log_level = "INFO"
"""

import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ParameterError
from .log import LOG_LEVELS

PRECISION_ENV = "DIGITDIM_PRECISION"
JOBS_ENV = "DIGITDIM_JOBS"
LOG_LEVEL_ENV = "DIGITDIM_LOG_LEVEL"

DEFAULT_PRECISION = 128
DEFAULT_GUARD = Fraction(1, 10**10)
DEFAULT_CHUNK_SIZE = 4096
MAX_PRECISION = 4096


@dataclass(frozen=True)
class Settings:
    precision: int = DEFAULT_PRECISION
    guard: Fraction = DEFAULT_GUARD
    jobs: int = 1
    chunk_size: int = DEFAULT_CHUNK_SIZE
    log_level: str = "WARN"

    def __post_init__(self):
        if not 16 <= self.precision <= MAX_PRECISION:
            raise ParameterError(
                f"precision must be between 16 and {MAX_PRECISION} bits, got {self.precision}"
            )
        if self.guard < 0:
            raise ParameterError(f"guard must be non-negative, got {self.guard}")
        if self.jobs < 1:
            raise ParameterError(f"jobs must be at least 1, got {self.jobs}")
        if self.chunk_size < 1:
            raise ParameterError(f"chunk_size must be at least 1, got {self.chunk_size}")
        if self.log_level.upper() not in LOG_LEVELS:
            raise ParameterError(f"unknown log level '{self.log_level}'")

    def with_precision(self, precision: int) -> "Settings":
        return replace(self, precision=precision)


def _as_int(name: str, value: Any) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be an integer, got {value!r}") from None


def _as_fraction(name: str, value: Any) -> Fraction:
    try:
        return Fraction(str(value))
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParameterError(f"{name} must be a rational number, got {value!r}") from None


def read_config_file(path: Union[str, Path]) -> dict:
    """Return the ``[digitdim]`` table of a TOML file (empty if absent)"""
    path = Path(path)
    try:
        with path.open("rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError:
        raise ParameterError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise ParameterError(f"invalid config file {path}: {e}") from None
    table = data.get("digitdim", {})
    if not isinstance(table, dict):
        raise ParameterError(f"[digitdim] in {path} must be a table")
    return table


def load_settings(
    config_path: Optional[Union[str, Path]] = None,
    env: Optional[Mapping[str, str]] = None,
    **overrides: Any,
) -> Settings:
    """
    Resolve settings from defaults, config file, environment and overrides.

    Overrides whose value is None are ignored so argparse namespaces can be
    passed through unchanged.
    """
    env = os.environ if env is None else env
    values: dict = {}

    if config_path is not None:
        values.update(read_config_file(config_path))

    if env.get(PRECISION_ENV):
        values["precision"] = env[PRECISION_ENV]
    if env.get(JOBS_ENV):
        values["jobs"] = env[JOBS_ENV]
    if env.get(LOG_LEVEL_ENV):
        values["log_level"] = env[LOG_LEVEL_ENV]

    values.update({k: v for k, v in overrides.items() if v is not None})

    unknown = set(values) - {"precision", "guard", "jobs", "chunk_size", "log_level"}
    if unknown:
        raise ParameterError(f"unknown setting(s): {', '.join(sorted(unknown))}")

    kwargs: dict = {}
    if "precision" in values:
        kwargs["precision"] = _as_int("precision", values["precision"])
    if "jobs" in values:
        kwargs["jobs"] = _as_int("jobs", values["jobs"])
    if "chunk_size" in values:
        kwargs["chunk_size"] = _as_int("chunk_size", values["chunk_size"])
    if "guard" in values:
        kwargs["guard"] = _as_fraction("guard", values["guard"])
    if "log_level" in values:
        kwargs["log_level"] = str(values["log_level"]).upper()
    return Settings(**kwargs)


def default_precision() -> int:
    """Working precision honoring DIGITDIM_PRECISION"""
    raw = os.environ.get(PRECISION_ENV)
    if not raw:
        return DEFAULT_PRECISION
    return Settings(precision=_as_int("precision", raw)).precision
