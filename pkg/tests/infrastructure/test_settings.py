"""Environment settings."""

import logging

import pytest
from pydantic import ValidationError

from app.domain.models.value_objects import Budgets
from app.infrastructure.settings import DeskSettings, configure_logging, load_settings
from app.utils.trace_logger import get_trace_logger

pytestmark = pytest.mark.unit


class TestSettings:
    def test_defaults_without_variables(self):
        settings = load_settings({})
        assert settings == DeskSettings()
        assert settings.log_level == "WARNING"
        assert settings.trace_console_logging
        assert not settings.trace_file_logging

    def test_variables_override_defaults(self):
        settings = load_settings(
            {
                "BOREL_SEARCH_CAP": "5",
                "BOREL_SEED": "42",
                "LOG_LEVEL": "DEBUG",
                "BOREL_TRACE_FILE_LOGGING": "true",
                "BOREL_TRACE_LOG_DIR": "/tmp/borel",
                "UNRELATED": "ignored",
            }
        )
        assert settings.search_cap == 5
        assert settings.seed == 42
        assert settings.log_level == "DEBUG"
        assert settings.trace_file_logging
        assert settings.trace_log_dir == "/tmp/borel"

    def test_budgets_mirror_the_settings(self):
        settings = load_settings({"BOREL_RULE_BUDGET": "64", "BOREL_DEPTH_BUDGET": "12"})
        assert settings.budgets == Budgets(
            rule_budget=64,
            search_cap=settings.search_cap,
            orbit_horizon=settings.orbit_horizon,
            depth_budget=12,
        )

    @pytest.mark.parametrize(
        "name, value",
        [("BOREL_SEARCH_CAP", "many"), ("BOREL_ORBIT_HORIZON", "0"), ("BOREL_SEED", "1.5")],
    )
    def test_malformed_values(self, name, value):
        with pytest.raises(ValidationError):
            load_settings({name: value})

    def test_process_environment_is_the_default(self, monkeypatch):
        monkeypatch.setenv("BOREL_SEED", "7")
        assert load_settings().seed == 7

    def test_settings_are_frozen(self):
        with pytest.raises(ValidationError):
            DeskSettings().seed = 3


class TestConfigureLogging:
    def test_trace_switches_reach_the_tracer(self, tmp_path):
        settings = DeskSettings(
            log_level="DEBUG",
            trace_file_logging=True,
            trace_console_logging=False,
            trace_log_dir=str(tmp_path),
        )
        tracer = configure_logging(settings, basic_config=False)
        assert tracer is get_trace_logger()
        assert tracer.enable_file_logging
        assert not tracer.enable_console_logging
        assert tracer.log_dir == tmp_path
        assert tracer.logger.level == logging.DEBUG

    def test_defaults_keep_files_off(self):
        tracer = configure_logging(load_settings({}), basic_config=False)
        assert not tracer.enable_file_logging
