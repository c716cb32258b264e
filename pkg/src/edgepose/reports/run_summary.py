"""Summaries of recorded runs for the ``report`` command."""

from __future__ import annotations

from datetime import datetime

from ..db.models import Run, SimulationRecord, SolutionRecord, SweepPoint
from ..db.session import session_scope


def build_run_summary(run_id: str) -> dict:
    with session_scope() as session:
        run = session.get(Run, run_id)
        if not run:
            raise ValueError(f"Run {run_id} not found")
        solutions = (
            session.query(SolutionRecord)
            .filter_by(run_id=run_id)
            .order_by(SolutionRecord.id)
            .all()
        )
        points = session.query(SweepPoint).filter_by(run_id=run_id).order_by(SweepPoint.id).all()
        sims = (
            session.query(SimulationRecord)
            .filter_by(run_id=run_id)
            .order_by(SimulationRecord.id)
            .all()
        )
        return {
            "run_id": run.run_id,
            "command": run.command,
            "stage": run.stage,
            "scenario_hash": run.scenario_hash,
            "created_at": run.created_at.isoformat() if isinstance(run.created_at, datetime) else str(run.created_at),
            "params": run.params_json,
            "solutions": [
                {
                    "strategy": s.strategy,
                    "sum_accuracy": s.sum_accuracy,
                    "delay_s": s.delay_s,
                    "feasible": s.feasible,
                    "outer_iterations": s.outer_iterations,
                    "thresholds": s.thresholds_json,
                    "tau": s.tau_json,
                }
                for s in solutions
            ],
            "sweep_points": [
                {
                    "axis": p.axis,
                    "axis_value": p.axis_value,
                    "strategy": p.strategy,
                    "sum_accuracy": p.sum_accuracy,
                    "mpjpe_m": p.mpjpe_m,
                    "delay_s": p.delay_s,
                    "feasible": p.feasible,
                    "drop_rate": p.drop_rate,
                }
                for p in points
            ],
            "simulations": [
                {
                    "frames": r.frames,
                    "empirical_accuracy": r.empirical_accuracy,
                    "analytic_accuracy": r.analytic_accuracy,
                    "mpjpe_m": r.mpjpe_m,
                    "delay_s": r.delay_s,
                    "drop_rate": r.drop_rate,
                }
                for r in sims
            ],
        }
