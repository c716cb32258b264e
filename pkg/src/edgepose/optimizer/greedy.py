"""Grid search over per-device confidence thresholds: a shared pass, then coordinate moves."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np

from ..delay import TimeAllocation, constant_delay_s, device_terms
from ..errors import InfeasibleError
from ..metrics import OutcomeTable, ThresholdSet, offload_profile, per_device_accuracy, server_table
from .config import OptimizerConfig, Strategy

if TYPE_CHECKING:
    from ..confidence import ConfidenceQuad
    from ..sim.scenario import Scenario

logger = logging.getLogger(__name__)

ACC_TOL = 1e-12
DELAY_TOL = 1e-12


def initial_thresholds(strategy: Strategy, n_devices: int) -> ThresholdSet:
    """Starting point of the alternating search: every threshold at 0.5 within the strategy family."""
    if strategy is Strategy.CASCADE:
        return ThresholdSet.uniform(n_devices, 0.0, 0.5, 0.5)
    if strategy is Strategy.SERVER:
        return ThresholdSet.uniform(n_devices, 0.0, 1.0, 0.5)
    return ThresholdSet.uniform(n_devices, 0.5, 0.5, 0.5)


def minimum_delay_thresholds(strategy: Strategy, theta_s: np.ndarray) -> ThresholdSet:
    """Least-traffic member of the strategy family (server thresholds kept)."""
    n = theta_s.size
    if strategy is Strategy.CASCADE:
        return ThresholdSet(np.zeros(n), np.zeros(n), theta_s)
    if strategy is Strategy.SERVER:
        return ThresholdSet(np.zeros(n), np.ones(n), theta_s)
    return ThresholdSet(np.ones(n), np.ones(n), theta_s)


def candidate_pairs(values: np.ndarray, strategy: Strategy) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (lo, hi) into sorted ``values`` admissible for the strategy."""
    n = values.size
    if strategy is Strategy.DEVICE:
        idx = np.arange(n)
        return idx, idx
    if strategy is Strategy.CASCADE:
        zero = int(np.searchsorted(values, 0.0))
        hi = np.arange(n)
        return np.full(n, zero), hi
    if strategy is Strategy.SERVER:
        return np.array([0]), np.array([n - 1])
    return np.triu_indices(n)


def pick_best(accuracy: np.ndarray, alpha: np.ndarray, width: np.ndarray, feasible: np.ndarray) -> int | None:
    """Highest accuracy; ties within ACC_TOL go to smaller alpha, then narrower band, then lower index."""
    if not np.any(feasible):
        return None
    acc = np.where(feasible, accuracy, -np.inf)
    top = float(acc.max())
    tied = np.flatnonzero(acc >= top - ACC_TOL)
    order = np.lexsort((tied, width[tied], alpha[tied]))
    return int(tied[order[0]])


def device_table(quad: ConfidenceQuad, values: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> OutcomeTable:
    pos = np.asarray(quad.dev_pos.cdf(values))
    neg = np.asarray(quad.dev_neg.cdf(values))
    return OutcomeTable.from_cdfs(pos[lo], pos[hi], neg[lo], neg[hi])


def shared_move(
    scenario: Scenario,
    values: np.ndarray,
    strategy: Strategy,
    theta_s: np.ndarray,
    rates: np.ndarray,
    budget: float,
) -> tuple[float, float, float] | None:
    """Best (theta_l, theta_h) applied to every device at once, with its accuracy sum.

    ``budget`` is the delay left after the constant terms. Returns None when no
    shared pair fits.
    """
    lo, hi = candidate_pairs(values, strategy)
    accuracy = np.zeros(lo.size)
    alpha = np.zeros(lo.size)
    delay = np.zeros(lo.size)
    for i in range(scenario.n_devices):
        quad = scenario.quad(i)
        table = device_table(quad, values, lo, hi)
        accuracy += table.accuracy(*server_table(quad, theta_s[i]))
        alpha += table.alpha
        delay += device_terms(scenario.traffic, scenario.compute, rates[i], table.alpha, table.beta)
    best = pick_best(accuracy, alpha, values[hi] - values[lo], delay <= budget + DELAY_TOL)
    if best is None:
        return None
    return float(values[lo[best]]), float(values[hi[best]]), float(accuracy[best])


def solve_thresholds(
    scenario: Scenario,
    tau: TimeAllocation,
    warm_start: ThresholdSet,
    config: OptimizerConfig | None = None,
    strategy: Strategy = Strategy.PROPOSED,
) -> ThresholdSet:
    """Greedy search with tau fixed; never returns a point worse than a feasible warm start.

    Raises InfeasibleError carrying the least achievable delay at this tau when
    not even the least-traffic thresholds meet the budget.
    """
    config = config or OptimizerConfig()
    d_req = config.d_req_s or scenario.d_req_s
    grid = config.grid()
    n = scenario.n_devices
    rates = tau.tau * scenario.radio.spectral_rates()
    base = constant_delay_s(scenario.compute, include_device_inference=strategy.runs_device_inference)

    def contributions(thresholds: ThresholdSet) -> np.ndarray:
        alpha, beta = offload_profile(scenario.quads, thresholds)
        return device_terms(scenario.traffic, scenario.compute, rates, alpha, beta)

    def total(terms: np.ndarray) -> float:
        return base + math.fsum(terms.tolist()) if np.all(np.isfinite(terms)) else math.inf

    current = warm_start
    terms = contributions(current)
    if total(terms) > d_req + DELAY_TOL:
        current = minimum_delay_thresholds(strategy, np.array(warm_start.theta_s))
        terms = contributions(current)
        floor = total(terms)
        if floor > d_req + DELAY_TOL:
            logger.info("No thresholds meet %.4g s at this allocation; least delay %.6g s", d_req, floor)
            raise InfeasibleError(
                f"least achievable delay {floor:.6g} s exceeds the {d_req:.6g} s budget",
                min_delay_s=floor,
            )
        logger.debug("Warm start infeasible; restarting from least-traffic thresholds")

    lo_all = np.array(current.theta_l)
    hi_all = np.array(current.theta_h)
    srv_all = np.array(current.theta_s)
    for round_no in range(1, config.max_greedy_rounds + 1):
        changed = False
        if strategy is not Strategy.SERVER:
            # whole-fleet move first, coordinate moves refine it
            move = shared_move(scenario, grid, strategy, srv_all, rates, d_req - base)
            held = per_device_accuracy(scenario.quads, ThresholdSet(lo_all, hi_all, srv_all))
            if move is not None and move[2] > math.fsum(held.tolist()) + ACC_TOL:
                lo_all[:], hi_all[:] = move[0], move[1]
                terms = contributions(ThresholdSet(lo_all, hi_all, srv_all))
                changed = True
            for i in range(n):
                quad = scenario.quad(i)
                values = np.unique(np.concatenate([grid, [lo_all[i], hi_all[i]]]))
                lo, hi = candidate_pairs(values, strategy)
                table = device_table(quad, values, lo, hi)
                srv_tp, srv_tn = server_table(quad, srv_all[i])
                accuracy = table.accuracy(srv_tp, srv_tn)
                others = math.fsum(np.delete(terms, i).tolist())
                delay = base + others + device_terms(
                    scenario.traffic, scenario.compute, rates[i], table.alpha, table.beta
                )
                feasible = delay <= d_req + DELAY_TOL
                at = np.flatnonzero((values[lo] == lo_all[i]) & (values[hi] == hi_all[i]))
                current_acc = float(accuracy[at[0]]) if at.size else -math.inf
                best = pick_best(accuracy, table.alpha, values[hi] - values[lo], feasible)
                if best is None or accuracy[best] <= current_acc + ACC_TOL:
                    continue
                lo_all[i], hi_all[i] = values[lo[best]], values[hi[best]]
                terms = terms.copy()
                terms[i] = float(
                    device_terms(
                        scenario.traffic,
                        scenario.compute,
                        rates[i],
                        table.alpha[best],
                        table.beta[best],
                    )
                )
                changed = True
        for i in range(n):
            quad = scenario.quad(i)
            table = device_table(quad, np.array([lo_all[i], hi_all[i]]), np.array([0]), np.array([1]))
            values = np.unique(np.concatenate([grid, [srv_all[i]]]))
            srv_tp, srv_tn = server_table(quad, values)
            accuracy = table.accuracy(srv_tp, srv_tn)
            at = int(np.searchsorted(values, srv_all[i]))
            best = int(np.argmax(accuracy))
            if accuracy[best] > accuracy[at] + ACC_TOL:
                srv_all[i] = values[best]
                changed = True
        if not changed:
            break
    else:
        logger.warning("Threshold search hit %d rounds without settling", config.max_greedy_rounds)
    logger.debug("Threshold search settled after %d rounds", round_no)
    return ThresholdSet(lo_all, hi_all, srv_all)
