"""Run registry persistence."""

from .models import Base, Run, SimulationRecord, SolutionRecord, SweepPoint
from .session import configure_engine, get_engine, get_session, init_db, session_scope

__all__ = [
    "Base",
    "Run",
    "SimulationRecord",
    "SolutionRecord",
    "SweepPoint",
    "configure_engine",
    "get_engine",
    "get_session",
    "init_db",
    "session_scope",
]
