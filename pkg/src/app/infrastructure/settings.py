"""Environment settings for the command line and the graph entry."""

import logging
import os
import sys
from typing import Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..domain.models.value_objects import Budgets
from ..utils.trace_logger import OperationTraceLogger, configure_trace_logger

logger = logging.getLogger(__name__)


class DeskSettings(BaseModel):
    """Budgets, the default seed and logging switches read from ``BOREL_*`` variables"""

    model_config = ConfigDict(frozen=True)

    rule_budget: int = Field(default=1 << 16, gt=0)
    search_cap: int = Field(default=20, gt=0)
    orbit_horizon: int = Field(default=1 << 16, gt=0)
    depth_budget: int = Field(default=256, gt=0)
    seed: int = 0
    log_level: str = "WARNING"
    trace_file_logging: bool = False
    trace_console_logging: bool = True
    trace_log_dir: str = "./logs/traces"

    @property
    def budgets(self) -> Budgets:
        return Budgets(
            rule_budget=self.rule_budget,
            search_cap=self.search_cap,
            orbit_horizon=self.orbit_horizon,
            depth_budget=self.depth_budget,
        )


_ENVIRONMENT = {
    "rule_budget": "BOREL_RULE_BUDGET",
    "search_cap": "BOREL_SEARCH_CAP",
    "orbit_horizon": "BOREL_ORBIT_HORIZON",
    "depth_budget": "BOREL_DEPTH_BUDGET",
    "seed": "BOREL_SEED",
    "log_level": "LOG_LEVEL",
    "trace_file_logging": "BOREL_TRACE_FILE_LOGGING",
    "trace_console_logging": "BOREL_TRACE_CONSOLE_LOGGING",
    "trace_log_dir": "BOREL_TRACE_LOG_DIR",
}


def load_settings(environ: Optional[Mapping[str, str]] = None) -> DeskSettings:
    """Read settings from the environment; unset variables keep their defaults.

    Raises pydantic.ValidationError for malformed values.
    """
    environ = os.environ if environ is None else environ
    values = {field: environ[name] for field, name in _ENVIRONMENT.items() if name in environ}
    settings = DeskSettings(**values)
    logger.debug(f"Settings loaded: {settings.model_dump()}")
    return settings


def configure_logging(settings: DeskSettings, basic_config: bool = True) -> OperationTraceLogger:
    """Apply the logging switches: the root level on stderr and the operation tracer."""
    if basic_config:
        logging.basicConfig(
            level=getattr(logging, settings.log_level.upper(), logging.WARNING),
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
    return configure_trace_logger(
        log_dir=settings.trace_log_dir,
        enable_file_logging=settings.trace_file_logging,
        enable_console_logging=settings.trace_console_logging,
        log_level=settings.log_level,
    )
