"""Parameter sweeps and threshold trade-off tables."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence

import numpy as np
import pandas as pd

from ..metrics import ThresholdSet, offload_profile
from ..optimizer import OptimizerConfig, Strategy, evaluate, kkt_allocation, optimize
from .scenario import Scenario
from .simulator import simulate

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "axis_value",
    "strategy",
    "sum_accuracy",
    "mpjpe_m",
    "delay_s",
    "feasible",
    "drop_rate",
]
MAP_COLUMNS = ["theta_l", "theta_h", "mean_accuracy", "delay_s", "feasible"]
CURVE_COLUMNS = ["theta", "strategy", "mean_accuracy", "delay_s", "mpjpe_m"]

AXES: dict[str, Callable[[Scenario, float], Scenario]] = {
    "d_req": lambda s, v: s.with_d_req(float(v)),
    "n_devices": lambda s, v: s.with_devices(int(v)),
    "gain_db": lambda s, v: s.with_gain_mean(float(v)),
    "image_bytes": lambda s, v: s.with_image_bytes(float(v)),
    "t_inf_device": lambda s, v: s.with_t_inf_device(float(v)),
}


def apply_axis(scenario: Scenario, axis: str, value: float) -> Scenario:
    try:
        return AXES[axis](scenario, value)
    except KeyError:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {sorted(AXES)}") from None


def sweep(
    scenario: Scenario,
    axis: str,
    values: Sequence[float],
    strategies: Iterable[Strategy | str] = tuple(Strategy),
    config: OptimizerConfig | None = None,
    *,
    frames: int = 0,
) -> pd.DataFrame:
    """Optimise every strategy at every axis value.

    With ``frames > 0`` each solution is also simulated and MPJPE/drop rate are
    filled in; otherwise those columns are nan. Infeasible points stay in the
    table with their least achievable delay.
    """
    config = config or OptimizerConfig()
    chosen = [Strategy(s) for s in strategies]
    if config.d_req_s is not None and axis == "d_req":
        config = config.model_copy(update={"d_req_s": None})
    rows = []
    for value in values:
        point = apply_axis(scenario, axis, value)
        for strategy in chosen:
            solution = optimize(point, config, strategy)
            mpjpe = drop = math.nan
            if frames > 0 and solution.feasible:
                result = simulate(point, solution.thresholds, solution.tau, frames, strategy=strategy)
                mpjpe, drop = result.empirical_mpjpe_m, result.drop_rate
            delay = solution.mean_delay_s
            if not solution.feasible and solution.diagnostics.min_delay_s is not None:
                delay = solution.diagnostics.min_delay_s
            rows.append(
                {
                    "axis_value": value,
                    "strategy": strategy.value,
                    "sum_accuracy": solution.sum_accuracy,
                    "mpjpe_m": mpjpe,
                    "delay_s": delay,
                    "feasible": solution.feasible,
                    "drop_rate": drop,
                }
            )
            logger.debug("sweep %s=%s %s: %s", axis, value, strategy.value, rows[-1])
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def threshold_map(scenario: Scenario, theta_s: float = 0.3, grid_points: int = 21) -> pd.DataFrame:
    """Accuracy and delay over every shared (theta_l <= theta_h) pair at a fixed server threshold."""
    grid = np.linspace(0.0, 1.0, grid_points)
    n = scenario.n_devices
    rows = []
    for lo_idx, hi_idx in zip(*np.triu_indices(grid_points)):
        thresholds = ThresholdSet.uniform(n, grid[lo_idx], grid[hi_idx], theta_s)
        tau = kkt_allocation(scenario, *offload_profile(scenario.quads, thresholds))
        sum_acc, breakdown = evaluate(scenario, thresholds, tau)
        rows.append(
            {
                "theta_l": float(grid[lo_idx]),
                "theta_h": float(grid[hi_idx]),
                "mean_accuracy": sum_acc / n,
                "delay_s": breakdown.total,
                "feasible": breakdown.total <= scenario.d_req_s,
            }
        )
    return pd.DataFrame(rows, columns=MAP_COLUMNS)


def threshold_curve(scenario: Scenario, grid_points: int = 21, frames: int = 0) -> pd.DataFrame:
    """Single-threshold curves: device-centric (theta_l = theta_h = t) and server-centric (theta_s = t)."""
    grid = np.linspace(0.0, 1.0, grid_points)
    n = scenario.n_devices
    rows = []
    for strategy in (Strategy.DEVICE, Strategy.SERVER):
        for t in grid:
            if strategy is Strategy.DEVICE:
                thresholds = ThresholdSet.uniform(n, t, t, 0.5)
            else:
                thresholds = ThresholdSet.uniform(n, 0.0, 1.0, t)
            tau = kkt_allocation(scenario, *offload_profile(scenario.quads, thresholds))
            sum_acc, breakdown = evaluate(scenario, thresholds, tau, strategy)
            mpjpe = math.nan
            if frames > 0:
                mpjpe = simulate(scenario, thresholds, tau, frames, strategy=strategy).empirical_mpjpe_m
            rows.append(
                {
                    "theta": float(t),
                    "strategy": strategy.value,
                    "mean_accuracy": sum_acc / n,
                    "delay_s": breakdown.total,
                    "mpjpe_m": mpjpe,
                }
            )
    return pd.DataFrame(rows, columns=CURVE_COLUMNS)
