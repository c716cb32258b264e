"""Empirical check that higher accuracy sums go with lower pose error."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Literal

import numpy as np
import pandas as pd
from scipy import stats

from ..metrics import ThresholdSet, offload_profile
from ..optimizer import kkt_allocation
from .scenario import Scenario
from .simulator import simulate

logger = logging.getLogger(__name__)

LEMMA_COLUMNS = ["point", "sum_accuracy", "mpjpe_m", "effective_mpjpe_m", "drop_rate", "delay_s"]


def default_lemma_sweep(
    n_devices: int, points: int = 25, centre: float = 0.5, theta_s: float = 0.5
) -> list[ThresholdSet]:
    """Low-to-high accuracy sweep.

    A device-only arm raises theta_l = theta_h = t towards ``centre``; a
    cooperative arm then widens the offload band around it.
    """
    if points < 2:
        raise ValueError("a sweep needs at least 2 points")
    device_points = points // 2
    band_points = points - device_points
    sweep = [
        ThresholdSet.uniform(n_devices, t, t, theta_s)
        for t in np.linspace(0.05, centre, device_points, endpoint=False)
    ]
    reach = min(centre, 1.0 - centre)
    for w in np.linspace(0.0, reach, band_points):
        sweep.append(ThresholdSet.uniform(n_devices, centre - w, centre + w, theta_s))
    return sweep


def validate_lemma1(
    scenario: Scenario,
    threshold_sweep: Sequence[ThresholdSet],
    n_frames: int,
    rng: np.random.Generator | int | None = None,
    *,
    metric: Literal["effective", "triangulated"] = "effective",
) -> tuple[pd.DataFrame, float | None]:
    """Simulate every sweep point and rank-correlate the accuracy sum with -MPJPE.

    Returns ``None`` for the correlation when it is undefined (fewer than two
    points, or a constant column).
    """
    seed = scenario.seed if rng is None else rng
    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(0, 2**63))
    rows = []
    for k, thresholds in enumerate(threshold_sweep):
        tau = kkt_allocation(scenario, *offload_profile(scenario.quads, thresholds))
        result = simulate(scenario, thresholds, tau, n_frames, seed)
        rows.append(
            {
                "point": k,
                "sum_accuracy": result.analytic_sum_accuracy,
                "mpjpe_m": result.empirical_mpjpe_m,
                "effective_mpjpe_m": result.effective_mpjpe_m,
                "drop_rate": result.drop_rate,
                "delay_s": result.mean_delay_s,
            }
        )
    table = pd.DataFrame(rows, columns=LEMMA_COLUMNS)
    column = "effective_mpjpe_m" if metric == "effective" else "mpjpe_m"
    return table, rank_correlation(table["sum_accuracy"].to_numpy(), -table[column].to_numpy())


def rank_correlation(x: np.ndarray, y: np.ndarray) -> float | None:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        return None
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    rho = stats.spearmanr(x, y).statistic
    if not np.isfinite(rho):
        logger.info("Rank correlation undefined for this sweep")
        return None
    return float(rho)
