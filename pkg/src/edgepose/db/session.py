"""Session utilities for the SQLite run registry."""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

from sqlalchemy import Engine, create_engine
from sqlalchemy.orm import Session, sessionmaker

from ..config.settings import db_path


def _build_engine(path: Path) -> Engine:
    return create_engine(f"sqlite:///{path}", connect_args={"check_same_thread": False})


DB_PATH = db_path()
_engine: Engine | None = None
_Session: sessionmaker[Session] | None = None


def configure_engine(path: str | Path) -> None:
    """Point the registry at another database file (tests, ``--db``)."""
    global DB_PATH, _engine, _Session
    DB_PATH = Path(path)
    _engine = _build_engine(DB_PATH)
    _Session = sessionmaker(bind=_engine, autoflush=False, autocommit=False)


def get_engine() -> Engine:
    if _engine is None:
        configure_engine(DB_PATH)
    assert _engine is not None
    return _engine


def get_session() -> Session:
    get_engine()
    assert _Session is not None
    return _Session()


@contextmanager
def session_scope() -> Iterator[Session]:
    session = get_session()
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()


def init_db() -> None:
    from .models import Base

    Base.metadata.create_all(get_engine())
