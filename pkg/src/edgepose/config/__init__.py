"""Scenario documents and process settings."""

from .loader import (
    DEFAULT_SCENARIO_PATH,
    ScenarioFile,
    build_scenario_file,
    load_scenario_file,
    parse_flat,
)
from .settings import DB_PATH_ENV, LOG_LEVEL_ENV, THREADS_ENV, db_path, fanout_width, log_level

__all__ = [
    "DB_PATH_ENV",
    "DEFAULT_SCENARIO_PATH",
    "LOG_LEVEL_ENV",
    "THREADS_ENV",
    "ScenarioFile",
    "build_scenario_file",
    "db_path",
    "fanout_width",
    "load_scenario_file",
    "log_level",
    "parse_flat",
]
