#!/usr/bin/env python3
"""Settings resolution and the log level API."""

import logging
from fractions import Fraction

import pytest

import digitdim
from digitdim.config import (
    DEFAULT_PRECISION,
    JOBS_ENV,
    LOG_LEVEL_ENV,
    PRECISION_ENV,
    Settings,
    default_precision,
    load_settings,
)
from digitdim.errors import ParameterError


@pytest.fixture
def restore_level():
    level = digitdim.get_log_level()
    yield
    digitdim.set_log_level(level)


def write_config(tmp_path, body: str):
    path = tmp_path / "digitdim.toml"
    path.write_text(body, encoding="utf-8")
    return path


# -- logging ----------------------------------------------------------------------


def test_log_level_api(restore_level):
    for name in ("TRACE", "DEBUG", "INFO", "WARN", "ERROR"):
        digitdim.set_log_level(name)
        assert digitdim.get_log_level() == name
    digitdim.set_log_level("debug")
    assert digitdim.get_log_level() == "DEBUG"


def test_invalid_log_level(restore_level):
    with pytest.raises(ValueError):
        digitdim.set_log_level("INVALID")


def test_logger_writes_prefixed_lines_to_stderr():
    root = logging.getLogger("digitdim")
    assert not root.propagate
    handler = root.handlers[0]
    assert handler.formatter._fmt.startswith("[digitdim] %(levelname)s")
    assert isinstance(handler, logging.StreamHandler)


# -- settings ---------------------------------------------------------------------


def test_defaults():
    s = load_settings(env={})
    assert s == Settings()
    assert s.precision == DEFAULT_PRECISION
    assert s.guard == Fraction(1, 10 ** 10)
    assert s.jobs == 1


def test_precedence(tmp_path):
    path = write_config(tmp_path, '[digitdim]\nprecision = 192\njobs = 2\nguard = "1e-12"\n')
    s = load_settings(path, env={})
    assert (s.precision, s.jobs, s.guard) == (192, 2, Fraction(1, 10 ** 12))

    s = load_settings(path, env={PRECISION_ENV: "256", JOBS_ENV: "3"})
    assert (s.precision, s.jobs) == (256, 3)

    s = load_settings(path, env={PRECISION_ENV: "256"}, precision=320, jobs=None)
    assert (s.precision, s.jobs) == (320, 2)


def test_log_level_from_env():
    assert load_settings(env={LOG_LEVEL_ENV: "debug"}).log_level == "DEBUG"


@pytest.mark.parametrize(
    "overrides",
    [{"precision": 8}, {"precision": "many"}, {"jobs": 0}, {"guard": "-1"},
     {"log_level": "LOUD"}, {"colour": "blue"}],
)
def test_invalid_settings(overrides):
    with pytest.raises(ParameterError):
        load_settings(env={}, **overrides)


def test_bad_config_files(tmp_path):
    with pytest.raises(ParameterError):
        load_settings(tmp_path / "missing.toml", env={})
    with pytest.raises(ParameterError):
        load_settings(write_config(tmp_path, "[digitdim\n"), env={})
    with pytest.raises(ParameterError):
        load_settings(write_config(tmp_path, "digitdim = 3\n"), env={})


def test_with_precision():
    assert Settings().with_precision(512).precision == 512


def test_default_precision_env(monkeypatch):
    monkeypatch.setenv(PRECISION_ENV, "200")
    assert default_precision() == 200
    monkeypatch.delenv(PRECISION_ENV)
    assert default_precision() == DEFAULT_PRECISION
