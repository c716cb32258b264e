import math

import pandas as pd
import pytest

from edgepose.optimizer import Strategy, optimize
from edgepose.reports import build_run_summary
from edgepose.runs import create_run, load_run, record_solution, record_sweep, update_run_stage
from edgepose.sim import SWEEP_COLUMNS


def test_build_run_summary_with_solution(temp_db, pair_scenario):
    run = create_run("optimize", params={"strategy": "device"}, scenario_hash="abc")
    solution = optimize(pair_scenario, strategy=Strategy.DEVICE)
    record_solution(run.run_id, solution)
    summary = build_run_summary(run.run_id)
    assert summary["run_id"] == run.run_id
    assert summary["stage"] == "optimize"
    assert summary["params"] == {"strategy": "device"}
    recorded = summary["solutions"][0]
    assert recorded["strategy"] == "device"
    assert recorded["sum_accuracy"] == pytest.approx(solution.sum_accuracy)
    assert recorded["thresholds"]["theta_l"] == solution.thresholds.theta_l.tolist()
    assert recorded["tau"] == pytest.approx(solution.tau.tau.tolist())


def test_sweep_points_store_missing_values_as_null(temp_db):
    run = create_run("sweep")
    frame = pd.DataFrame(
        [[0.5, "server", 3.99, math.nan, 0.837, False, math.nan]], columns=SWEEP_COLUMNS
    )
    record_sweep(run.run_id, "d_req", frame)
    point = build_run_summary(run.run_id)["sweep_points"][0]
    assert point["axis"] == "d_req"
    assert point["mpjpe_m"] is None
    assert point["feasible"] is False
    assert point["delay_s"] == pytest.approx(0.837)


def test_stage_updates_and_missing_runs(temp_db):
    run = create_run("simulate")
    update_run_stage(run.run_id, "simulate_completed")
    assert load_run(run.run_id).stage == "simulate_completed"
    with pytest.raises(ValueError):
        load_run("nope")
    with pytest.raises(ValueError):
        build_run_summary("nope")
    assert build_run_summary(run.run_id)["simulations"] == []
