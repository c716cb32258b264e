"""Run context creation and result recording."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import TYPE_CHECKING, Any, Dict

import pandas as pd

from ..db.models import Run, SimulationRecord, SolutionRecord, SweepPoint
from ..db.session import session_scope

if TYPE_CHECKING:
    from ..optimizer import Solution
    from ..sim import SimResult


@dataclass
class RunContext:
    run_id: str
    command: str
    scenario_hash: str | None
    created_at: datetime
    params_json: Dict[str, Any] | None
    stage: str


def create_run(
    command: str,
    params: Dict[str, Any] | None = None,
    scenario_hash: str | None = None,
) -> RunContext:
    with session_scope() as session:
        run = Run(command=command, scenario_hash=scenario_hash, params_json=params, stage=command)
        session.add(run)
        session.flush()
        return _to_context(run)


def load_run(run_id: str) -> RunContext:
    with session_scope() as session:
        run = session.get(Run, run_id)
        if not run:
            raise ValueError(f"Run {run_id} not found")
        return _to_context(run)


def update_run_stage(run_id: str, stage: str) -> None:
    with session_scope() as session:
        run = session.get(Run, run_id)
        if not run:
            raise ValueError(f"Run {run_id} not found")
        run.stage = stage


def record_solution(run_id: str, solution: Solution) -> None:
    summary = solution.summary()
    with session_scope() as session:
        session.add(
            SolutionRecord(
                run_id=run_id,
                strategy=summary["strategy"],
                thresholds_json={k: summary[k] for k in ("theta_l", "theta_h", "theta_s")},
                tau_json=summary["tau"],
                sum_accuracy=summary["sum_accuracy"],
                delay_s=_finite(summary["delay_s"]),
                feasible=summary["feasible"],
                outer_iterations=summary["outer_iterations"],
            )
        )


def record_sweep(run_id: str, axis: str, frame: pd.DataFrame) -> None:
    with session_scope() as session:
        for row in frame.itertuples(index=False):
            session.add(
                SweepPoint(
                    run_id=run_id,
                    axis=axis,
                    axis_value=float(row.axis_value),
                    strategy=row.strategy,
                    sum_accuracy=float(row.sum_accuracy),
                    mpjpe_m=_finite(row.mpjpe_m),
                    delay_s=_finite(row.delay_s),
                    feasible=bool(row.feasible),
                    drop_rate=_finite(row.drop_rate),
                )
            )


def record_simulation(run_id: str, result: SimResult) -> None:
    with session_scope() as session:
        session.add(
            SimulationRecord(
                run_id=run_id,
                frames=result.frames,
                empirical_accuracy=result.empirical_sum_accuracy,
                analytic_accuracy=result.analytic_sum_accuracy,
                mpjpe_m=_finite(result.empirical_mpjpe_m),
                delay_s=result.mean_delay_s,
                drop_rate=result.drop_rate,
            )
        )


def _finite(value: Any) -> float | None:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _to_context(run: Run) -> RunContext:
    return RunContext(
        run_id=run.run_id,
        command=run.command,
        scenario_hash=run.scenario_hash,
        created_at=run.created_at,
        params_json=run.params_json,
        stage=run.stage,
    )
