"""
Tests for environment-driven settings.
"""

from __future__ import annotations

import io

import pytest

from config.settings import Settings, get_settings
from jetcalc.cli import run

_VARS = (
    "JETCALC_ANSATZ_LIMIT",
    "JETCALC_REDUCTION_MEMO",
    "JETCALC_LOG_LEVEL",
    "JETCALC_OUTPUT_FORMAT",
    "JETCALC_CORS_ORIGINS",
)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in _VARS:
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


class TestDefaults:
    def test_defaults(self):
        s = Settings()
        assert s.ansatz_limit == 20000
        assert s.reduction_memo is True
        assert s.log_level == "WARNING"
        assert s.output_format == "text"
        assert s.cors_origins == ()

    def test_cached(self):
        assert get_settings() is get_settings()


class TestOverrides:
    def test_values(self, monkeypatch):
        monkeypatch.setenv("JETCALC_ANSATZ_LIMIT", "500")
        monkeypatch.setenv("JETCALC_REDUCTION_MEMO", "off")
        monkeypatch.setenv("JETCALC_LOG_LEVEL", "debug")
        monkeypatch.setenv("JETCALC_OUTPUT_FORMAT", "JSON")
        monkeypatch.setenv("JETCALC_CORS_ORIGINS", "http://a.example, ,http://b.example")
        s = Settings()
        assert s.ansatz_limit == 500
        assert s.reduction_memo is False
        assert s.log_level == "DEBUG"
        assert s.output_format == "json"
        assert s.cors_origins == ("http://a.example", "http://b.example")

    def test_blank_means_default(self, monkeypatch):
        monkeypatch.setenv("JETCALC_ANSATZ_LIMIT", "  ")
        assert Settings().ansatz_limit == 20000


class TestMalformed:
    @pytest.mark.parametrize(
        "name, value, message",
        [
            ("JETCALC_ANSATZ_LIMIT", "many", "must be an integer"),
            ("JETCALC_ANSATZ_LIMIT", "-3", "must be >= 0"),
            ("JETCALC_REDUCTION_MEMO", "maybe", "must be a boolean"),
            ("JETCALC_LOG_LEVEL", "LOUD", "must be one of"),
            ("JETCALC_OUTPUT_FORMAT", "yaml", "must be one of"),
        ],
    )
    def test_raises(self, monkeypatch, name, value, message):
        monkeypatch.setenv(name, value)
        with pytest.raises(RuntimeError, match=message):
            Settings()

    def test_cli_reports_config_error(self, monkeypatch):
        monkeypatch.setenv("JETCALC_ANSATZ_LIMIT", "many")
        stderr = io.StringIO()
        assert run(["reduce", "--system", "kdv", "--expr", "u"], stdout=io.StringIO(), stderr=stderr) == 2
        assert stderr.getvalue().startswith("error[config]")
