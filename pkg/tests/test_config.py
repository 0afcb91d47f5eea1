"""Configuration getters, error objects and logging setup."""

import logging

from hypstretch.utils import config
from hypstretch.utils.errors import ErrorCode, HypStretchError
from hypstretch.utils.log_setup import configure_logging


def test_defaults():
    assert config.get_tolerance() == 1e-9
    assert config.get_sample_count() == 2000
    assert config.get_max_unroll() == 64
    assert config.get_seed() == 12345
    assert config.get_log_level() == "WARNING"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("HYPSTRETCH_TOL", "1e-7")
    monkeypatch.setenv("HYPSTRETCH_SAMPLES", "50")
    config.reset_config()
    assert config.get_tolerance() == 1e-7
    assert config.get_sample_count() == 50


def test_values_are_cached_until_reset(monkeypatch):
    assert config.get_tolerance() == 1e-9
    monkeypatch.setenv("HYPSTRETCH_TOL", "1e-6")
    assert config.get_tolerance() == 1e-9
    config.reset_config()
    assert config.get_tolerance() == 1e-6


def test_malformed_values_fall_back(monkeypatch):
    monkeypatch.setenv("HYPSTRETCH_MAX_UNROLL", "many")
    monkeypatch.setenv("HYPSTRETCH_TOL", "-1")
    config.reset_config()
    assert config.get_max_unroll() == 64
    assert config.get_tolerance() == 1e-9


def test_error_carries_code_and_context():
    err = HypStretchError(ErrorCode.PATH_BROKEN, "edge not glued", edge=("T", "l1"))
    assert err.code is ErrorCode.PATH_BROKEN
    assert str(err) == "PATH_BROKEN: edge not glued"
    data = err.to_dict()
    assert data["code"] == "PATH_BROKEN"
    assert data["context"] == {"edge": "('T', 'l1')"}


def test_error_message_defaults_to_code():
    assert HypStretchError("BAD_FILE").message == "BAD_FILE"


def test_configure_logging_sets_level():
    configure_logging("DEBUG")
    assert logging.getLogger().level == logging.DEBUG
    configure_logging("WARNING")
    assert logging.getLogger().level == logging.WARNING
