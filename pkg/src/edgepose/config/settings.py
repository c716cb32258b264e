"""Process-level settings read from the environment."""

from __future__ import annotations

import os
from collections.abc import Mapping
from pathlib import Path

THREADS_ENV = "EDGEPOSE_THREADS"
DB_PATH_ENV = "EDGEPOSE_DB_PATH"
LOG_LEVEL_ENV = "EDGEPOSE_LOG_LEVEL"


def fanout_width(env: Mapping[str, str] | None = None) -> int:
    """Worker count for data-parallel loops; ``0`` or unset means one per CPU."""
    env = os.environ if env is None else env
    raw = env.get(THREADS_ENV, "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0")
    return value or (os.cpu_count() or 1)


def db_path(env: Mapping[str, str] | None = None) -> Path:
    env = os.environ if env is None else env
    return Path(env.get(DB_PATH_ENV, "edgepose.db"))


def log_level(env: Mapping[str, str] | None = None) -> str:
    env = os.environ if env is None else env
    return env.get(LOG_LEVEL_ENV, "WARNING").upper()
