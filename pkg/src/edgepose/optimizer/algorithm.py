"""Alternating optimisation of airtime shares and thresholds, plus the exhaustive oracle."""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from ..delay import DelayBreakdown, TimeAllocation, delay_cooperative, transfer_time
from ..errors import InfeasibleError, InstanceTooLargeError
from ..metrics import (
    OutcomeTable,
    ThresholdSet,
    offload_profile,
    per_device_accuracy,
    server_table,
)
from .config import Diagnostics, OptimizerConfig, Solution, Strategy
from .dual import dual_ascent, fixed_delay, kkt_allocation, least_delay, solve_tau
from .greedy import (
    DELAY_TOL,
    device_table,
    candidate_pairs,
    initial_thresholds,
    minimum_delay_thresholds,
    solve_thresholds,
)

if TYPE_CHECKING:
    from ..sim.scenario import Scenario

logger = logging.getLogger(__name__)

DIAGNOSTIC_COLUMNS = ["iter", "sum_acc", "delay_s", "lambda", "mu"]
# combinations per batched dual solve
_BLOCK = 256
FEASIBILITY_TOL = 1e-9


def evaluate(
    scenario: Scenario,
    thresholds: ThresholdSet,
    tau: TimeAllocation,
    strategy: Strategy = Strategy.PROPOSED,
) -> tuple[float, DelayBreakdown]:
    """Sum of per-device accuracies and the delay breakdown at one operating point."""
    accuracy = per_device_accuracy(scenario.quads, thresholds)
    alpha, beta = offload_profile(scenario.quads, thresholds)
    breakdown = delay_cooperative(
        scenario.traffic,
        scenario.compute,
        scenario.radio,
        alpha,
        beta,
        tau,
        include_device_inference=strategy.runs_device_inference,
    )
    return math.fsum(accuracy.tolist()), breakdown


def _solution(
    scenario: Scenario,
    strategy: Strategy,
    thresholds: ThresholdSet,
    tau: TimeAllocation,
    d_req: float,
    outer: int,
    trace: list[float],
    diagnostics: Diagnostics,
    feasible: bool | None = None,
) -> Solution:
    sum_acc, breakdown = evaluate(scenario, thresholds, tau, strategy)
    if feasible is None:
        feasible = breakdown.total <= d_req + FEASIBILITY_TOL
    return Solution(
        strategy=strategy,
        thresholds=thresholds,
        tau=tau,
        sum_accuracy=sum_acc,
        per_device_accuracy=per_device_accuracy(scenario.quads, thresholds),
        mean_delay_s=breakdown.total,
        breakdown=breakdown,
        d_req_s=d_req,
        outer_iterations=outer,
        feasible=feasible,
        objective_trace=tuple(trace),
        diagnostics=diagnostics,
    )


def optimize(
    scenario: Scenario,
    config: OptimizerConfig | None = None,
    strategy: Strategy | str = Strategy.PROPOSED,
) -> Solution:
    """Alternate tau and threshold updates until the accuracy sum stops moving."""
    config = config or OptimizerConfig()
    strategy = Strategy(strategy)
    d_req = config.d_req_s or scenario.d_req_s
    n = scenario.n_devices
    thresholds = initial_thresholds(strategy, n)
    tau = TimeAllocation.uniform(n)
    lam, mu, inner, converged = 0.0, 1.0, 0, True
    trace: list[float] = []
    history: list[dict[str, float]] = []
    passes = 0

    for outer in range(1, config.max_outer_iters + 1):
        if strategy.optimizes_tau:
            result = solve_tau(scenario, thresholds, config, strategy, start=(lam, mu))
            tau, lam, mu = result.tau, result.lambda_, result.mu
            inner = max(inner, result.iterations)
            converged = converged and result.converged
        try:
            thresholds = solve_thresholds(scenario, tau, thresholds, config, strategy)
        except InfeasibleError as exc:
            floor = minimum_delay_thresholds(strategy, np.array(thresholds.theta_s))
            floor_tau = (
                kkt_allocation(scenario, *offload_profile(scenario.quads, floor))
                if strategy.optimizes_tau
                else tau
            )
            _, floor_delay = evaluate(scenario, floor, floor_tau, strategy)
            if floor_delay.total > d_req + DELAY_TOL:
                logger.info(
                    "Strategy %s is infeasible: least delay %.6g s", strategy.value, floor_delay.total
                )
                diagnostics = Diagnostics(
                    lam, mu, inner, converged, floor_delay.total, passes, tuple(history)
                )
                return _solution(
                    scenario, strategy, floor, floor_tau, d_req, outer, trace, diagnostics, False
                )
            logger.debug("Re-seeding from least-traffic thresholds (%s)", exc)
            tau = floor_tau
            thresholds = solve_thresholds(scenario, tau, floor, config, strategy)
        passes += 1
        sum_acc, breakdown = evaluate(scenario, thresholds, tau, strategy)
        trace.append(sum_acc)
        history.append(
            {"iter": outer, "sum_acc": sum_acc, "delay_s": breakdown.total, "lambda": lam, "mu": mu}
        )
        logger.debug(
            "outer %d: sum_acc=%.9f delay=%.6f lambda=%.4g mu=%.4g",
            outer,
            sum_acc,
            breakdown.total,
            lam,
            mu,
        )
        if len(trace) > 1 and abs(trace[-1] - trace[-2]) < config.epsilon:
            break

    diagnostics = Diagnostics(lam, mu, inner, converged, None, passes, tuple(history))
    return _solution(scenario, strategy, thresholds, tau, d_req, outer, trace, diagnostics)


def diagnostics_frame(solution: Solution) -> pd.DataFrame:
    """One row per outer iteration: iter, sum_acc, delay_s, lambda, mu."""
    return pd.DataFrame(list(solution.diagnostics.history), columns=DIAGNOSTIC_COLUMNS)


def exhaustive_search(
    scenario: Scenario,
    grid_points: int,
    config: OptimizerConfig | None = None,
    strategy: Strategy | str = Strategy.PROPOSED,
) -> Solution:
    """Enumerate every per-device threshold combination on an M-point grid.

    theta_s changes neither tau nor delay, so each device's best theta_s is fixed
    per (theta_l, theta_h) pair before combinations are enumerated. Every
    combination whose least achievable delay meets the budget gets its own dual
    solve for tau; the fixed-airtime strategy is scored at uniform shares.
    """
    config = config or OptimizerConfig()
    strategy = Strategy(strategy)
    d_req = config.d_req_s or scenario.d_req_s
    n = scenario.n_devices
    values = np.linspace(0.0, 1.0, grid_points)
    lo, hi = candidate_pairs(values, strategy)
    n_pairs = lo.size
    combinations = n_pairs**n
    if combinations > config.max_combinations:
        raise InstanceTooLargeError(
            f"{combinations} combinations ({n_pairs} pairs, {n} devices) exceed the budget of "
            f"{config.max_combinations}"
        )

    acc = np.empty((n, n_pairs))
    srv_best = np.empty((n, n_pairs))
    load = np.empty((n, n_pairs))
    alpha = np.empty((n, n_pairs))
    traffic = scenario.traffic
    for i in range(n):
        quad = scenario.quad(i)
        table = device_table(quad, values, lo, hi)
        srv_tp, srv_tn = server_table(quad, values)
        # rows: (theta_l, theta_h) pairs, columns: theta_s grid
        grid_acc = OutcomeTable(*(np.asarray(f)[:, None] for f in table)).accuracy(srv_tp, srv_tn)
        best_s = np.argmax(grid_acc, axis=1)
        acc[i] = grid_acc[np.arange(n_pairs), best_s]
        srv_best[i] = values[best_s]
        alpha[i] = table.alpha
        load[i] = traffic.fps * (table.alpha * traffic.image_bits + table.beta * traffic.message_bits)
    width = values[hi] - values[lo]
    ratio_table = load / scenario.radio.spectral_rates()[:, None]
    uniform = np.full(n, 1.0 / n)

    best_key: tuple[float, float, float, int] | None = None
    best_tau = uniform
    min_delay = math.inf
    solved = 0
    for start in range(0, combinations, _BLOCK):
        flat = np.arange(start, min(start + _BLOCK, combinations))
        picks = np.stack(np.unravel_index(flat, (n_pairs,) * n))
        rows = np.arange(n)[:, None]
        total_acc = acc[rows, picks].sum(axis=0)
        total_alpha = alpha[rows, picks].sum(axis=0)
        total_width = width[picks].sum(axis=0)
        ratio = ratio_table[rows, picks].T
        fixed = fixed_delay(scenario, alpha[rows, picks].T, load[rows, picks].T, strategy)
        if strategy.optimizes_tau:
            bound = least_delay(ratio, fixed)
            min_delay = min(min_delay, float(bound.min()))
            reachable = np.flatnonzero(bound <= d_req + DELAY_TOL)
            if reachable.size == 0:
                continue
            shares = dual_ascent(ratio[reachable], fixed[reachable], d_req, config).tau
            solved += reachable.size
        else:
            reachable = np.arange(flat.size)
            shares = np.broadcast_to(uniform, ratio.shape)
        delay = fixed[reachable] + transfer_time(ratio[reachable], shares).sum(axis=1)
        if not strategy.optimizes_tau:
            min_delay = min(min_delay, float(delay.min()))
        feasible = delay <= d_req + DELAY_TOL
        if not np.any(feasible):
            continue
        cand = reachable[feasible]
        rounded = np.round(total_acc[cand], 12)
        order = np.lexsort((flat[cand], total_width[cand], total_alpha[cand], -rounded))
        k = int(cand[order[0]])
        key = (-float(rounded[order[0]]), float(total_alpha[k]), float(total_width[k]), int(flat[k]))
        if best_key is None or key < best_key:
            best_key = key
            best_tau = shares[int(np.flatnonzero(feasible)[order[0]])]
    logger.debug("Exhaustive search ran %d dual solves over %d combinations", solved, combinations)

    if best_key is None:
        logger.info("Exhaustive search found no feasible point; least delay %.6g s", min_delay)
        floor = minimum_delay_thresholds(strategy, np.full(n, 0.5))
        floor_tau = (
            kkt_allocation(scenario, *offload_profile(scenario.quads, floor))
            if strategy.optimizes_tau
            else TimeAllocation.uniform(n)
        )
        diagnostics = Diagnostics(min_delay_s=min_delay)
        return _solution(scenario, strategy, floor, floor_tau, d_req, 0, [], diagnostics, False)

    choice = np.array(np.unravel_index(best_key[3], (n_pairs,) * n))
    thresholds = ThresholdSet(
        values[lo[choice]], values[hi[choice]], srv_best[np.arange(n), choice]
    )
    tau = TimeAllocation(np.array(best_tau) if strategy.optimizes_tau else uniform)
    sum_acc, _ = evaluate(scenario, thresholds, tau, strategy)
    return _solution(scenario, strategy, thresholds, tau, d_req, 0, [sum_acc], Diagnostics())
