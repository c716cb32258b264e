"""ORM models for the run registry."""

from __future__ import annotations

import uuid
from datetime import datetime, timezone

from sqlalchemy import JSON, Boolean, CheckConstraint, DateTime, Float, ForeignKey, Integer, String
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, relationship


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class Base(DeclarativeBase):
    pass


class Run(Base):
    __tablename__ = "runs"

    run_id: Mapped[str] = mapped_column(String, primary_key=True, default=lambda: str(uuid.uuid4()))
    command: Mapped[str] = mapped_column(String, nullable=False)
    scenario_hash: Mapped[str | None] = mapped_column(String)
    params_json: Mapped[dict | None] = mapped_column(JSON)
    stage: Mapped[str] = mapped_column(String, default="pending")
    created_at: Mapped[datetime] = mapped_column(DateTime, default=_utcnow)

    solutions: Mapped[list["SolutionRecord"]] = relationship(back_populates="run")


class SolutionRecord(Base):
    __tablename__ = "solutions"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    run_id: Mapped[str] = mapped_column(ForeignKey("runs.run_id"), nullable=False)
    strategy: Mapped[str] = mapped_column(String, nullable=False)
    thresholds_json: Mapped[dict] = mapped_column(JSON, nullable=False)
    tau_json: Mapped[list] = mapped_column(JSON, nullable=False)
    sum_accuracy: Mapped[float] = mapped_column(Float, nullable=False)
    delay_s: Mapped[float | None] = mapped_column(Float)
    feasible: Mapped[bool] = mapped_column(Boolean, nullable=False)
    outer_iterations: Mapped[int] = mapped_column(Integer, default=0)

    run: Mapped[Run] = relationship(back_populates="solutions")


class SweepPoint(Base):
    __tablename__ = "sweep_points"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    run_id: Mapped[str] = mapped_column(ForeignKey("runs.run_id"), nullable=False)
    axis: Mapped[str] = mapped_column(String, nullable=False)
    axis_value: Mapped[float] = mapped_column(Float, nullable=False)
    strategy: Mapped[str] = mapped_column(String, nullable=False)
    sum_accuracy: Mapped[float] = mapped_column(Float, nullable=False)
    mpjpe_m: Mapped[float | None] = mapped_column(Float)
    delay_s: Mapped[float | None] = mapped_column(Float)
    feasible: Mapped[bool] = mapped_column(Boolean, nullable=False)
    drop_rate: Mapped[float | None] = mapped_column(Float)


class SimulationRecord(Base):
    __tablename__ = "simulations"
    __table_args__ = (CheckConstraint("frames > 0"),)

    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    run_id: Mapped[str] = mapped_column(ForeignKey("runs.run_id"), nullable=False)
    frames: Mapped[int] = mapped_column(Integer, nullable=False)
    empirical_accuracy: Mapped[float] = mapped_column(Float, nullable=False)
    analytic_accuracy: Mapped[float] = mapped_column(Float, nullable=False)
    mpjpe_m: Mapped[float | None] = mapped_column(Float)
    delay_s: Mapped[float] = mapped_column(Float, nullable=False)
    drop_rate: Mapped[float] = mapped_column(Float, nullable=False)
