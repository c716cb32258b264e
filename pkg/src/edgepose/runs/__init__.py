"""Run context helpers."""

from .context import (
    RunContext,
    create_run,
    load_run,
    record_simulation,
    record_solution,
    record_sweep,
    update_run_stage,
)

__all__ = [
    "RunContext",
    "create_run",
    "load_run",
    "record_simulation",
    "record_solution",
    "record_sweep",
    "update_run_stage",
]
