"""Airtime allocation: Lagrangian dual iterations on the TDMA shares.

For fixed thresholds the uplink term sum_i B_i / (tau_i r_i) is convex in tau.
Stationarity gives tau_i = sqrt((1 + lambda) B_i / (mu r_i)); the multipliers
follow projected subgradient steps on the delay budget and the airtime simplex.
The iterations run batched, so the exhaustive oracle can solve many threshold
combinations at once with the same update rule.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from ..delay import TimeAllocation, constant_delay_s, device_terms, offered_load
from ..metrics import ThresholdSet, offload_profile
from .config import OptimizerConfig, Strategy

if TYPE_CHECKING:
    from ..sim.scenario import Scenario

logger = logging.getLogger(__name__)

MU_FLOOR = 1e-12
BUDGET_TOL = 1e-12


@dataclass(frozen=True)
class TauResult:
    tau: TimeAllocation
    lambda_: float
    mu: float
    iterations: int
    converged: bool
    delay_s: float
    feasible: bool = True


@dataclass(frozen=True)
class DualBatch:
    """Outcome of batched dual iterations; one row per allocation problem."""

    tau: np.ndarray
    lambda_: np.ndarray
    mu: np.ndarray
    converged: np.ndarray
    iterations: int


def kkt_allocation(scenario: Scenario, alpha: np.ndarray, beta: np.ndarray) -> TimeAllocation:
    """Delay-minimising shares tau_i proportional to sqrt(B_i / r_i), summing to one."""
    load = offered_load(scenario.traffic, alpha, beta)
    weights = np.sqrt(load / scenario.radio.spectral_rates())
    total = math.fsum(weights.tolist())
    if total <= 0.0:
        return TimeAllocation.uniform(scenario.n_devices)
    tau = weights / total
    # keep sum(tau) <= 1 after rounding
    excess = math.fsum(tau.tolist()) - 1.0
    if excess > 0:
        tau[int(np.argmax(tau))] -= excess
    return TimeAllocation(np.clip(tau, 0.0, 1.0))


def fixed_delay(
    scenario: Scenario, alpha: np.ndarray, load: np.ndarray, strategy: Strategy = Strategy.PROPOSED
) -> np.ndarray:
    """Delay that no airtime share can change: constants, server inference and rate backhaul.

    Devices sit on the last axis of ``alpha`` and ``load``.
    """
    compute = scenario.compute
    base = constant_delay_s(compute, include_device_inference=strategy.runs_device_inference)
    out = base + compute.t_inf_server_s * np.sum(alpha, axis=-1)
    if compute.backhaul.mode == "rate":
        out = out + np.sum(load, axis=-1) / compute.backhaul.rate_bps
    return np.asarray(out, dtype=float)


def least_delay(ratio: np.ndarray, fixed: np.ndarray | float) -> np.ndarray:
    """Delay under the KKT shares: fixed part plus (sum_i sqrt(B_i / r_i))^2."""
    return np.asarray(fixed) + np.sum(np.sqrt(ratio), axis=-1) ** 2


def dual_ascent(
    ratio: np.ndarray,
    fixed: np.ndarray | float,
    d_req: float,
    config: OptimizerConfig,
    start: tuple[float, float] = (0.0, 1.0),
) -> DualBatch:
    """Run the multiplier updates on a batch of allocation problems.

    ``ratio`` holds B_i / r_i (load over the full-airtime rate), devices on the
    last axis. A problem settles once its unclipped shares move by less than
    epsilon; its multipliers are frozen from then on. Settled shares are
    rescaled onto sum(tau) = 1, the rest keep their last clipped iterate (scaled
    down only when it overfills the frame).
    """
    ratio = np.atleast_2d(np.asarray(ratio, dtype=float))
    batch = ratio.shape[0]
    fixed = np.broadcast_to(np.asarray(fixed, dtype=float), (batch,))
    busy = ratio > 0
    lam = np.full(batch, start[0])
    mu = np.full(batch, max(start[1], MU_FLOOR))
    raw = np.zeros_like(ratio)
    settled = np.zeros(batch, dtype=bool)
    k1, k2 = config.kappa1, config.kappa2
    iterations = 0
    for iterations in range(1, config.max_inner_iters + 1):
        proposal = np.sqrt(ratio * ((1.0 + lam) / mu)[:, None])
        tau = np.minimum(proposal, 1.0)
        uplink = np.divide(ratio, tau, out=np.zeros_like(ratio), where=busy)
        delay = fixed + uplink.sum(axis=1)
        live = ~settled
        lam = np.where(live, np.maximum(0.0, lam + k1 * (delay - d_req)), lam)
        mu = np.where(live, np.maximum(MU_FLOOR, mu + k2 * (tau.sum(axis=1) - 1.0)), mu)
        step = np.abs(proposal - raw).max(axis=1)
        raw = proposal
        settled |= step < config.epsilon
        k1 *= config.kappa_decay
        k2 *= config.kappa_decay
        if settled.all():
            break

    total = raw.sum(axis=1, keepdims=True)
    filled = np.divide(raw, total, out=np.full_like(raw, 1.0 / raw.shape[1]), where=total > 0)
    last = np.minimum(raw, 1.0)
    overfull = last.sum(axis=1, keepdims=True)
    last = np.where(overfull > 1.0, last / np.maximum(overfull, 1.0), last)
    tau = np.where(settled[:, None], filled, last)
    return DualBatch(np.clip(tau, 0.0, 1.0), lam, mu, settled, iterations)


def solve_tau(
    scenario: Scenario,
    thresholds: ThresholdSet,
    config: OptimizerConfig | None = None,
    strategy: Strategy = Strategy.PROPOSED,
    start: tuple[float, float] = (0.0, 1.0),
) -> TauResult:
    """Airtime shares for fixed thresholds, taken from the final dual iterate.

    ``start`` seeds (lambda, mu); the alternating search passes the previous
    multipliers so later calls settle in a few steps.
    """
    config = config or OptimizerConfig()
    d_req = config.d_req_s or scenario.d_req_s
    alpha, beta = offload_profile(scenario.quads, thresholds)
    load = offered_load(scenario.traffic, alpha, beta)
    rates = scenario.radio.spectral_rates()
    ratio = load / rates
    fixed = float(fixed_delay(scenario, alpha, load, strategy))
    base = constant_delay_s(scenario.compute, include_device_inference=strategy.runs_device_inference)

    def delay_at(tau: TimeAllocation) -> float:
        terms = device_terms(scenario.traffic, scenario.compute, tau.tau * rates, alpha, beta)
        return base + math.fsum(terms.tolist()) if np.all(np.isfinite(terms)) else math.inf

    if not np.any(load > 0):
        tau = TimeAllocation.uniform(scenario.n_devices)
        delay = delay_at(tau)
        return TauResult(tau, 0.0, 1.0, 0, True, delay, delay <= d_req + BUDGET_TOL)

    floor = float(least_delay(ratio, fixed))
    if floor > d_req + BUDGET_TOL:
        # no multiplier pair can meet the budget; report the least-delay shares
        logger.info("Budget %.4g s is out of reach (least delay %.6g s)", d_req, floor)
        tau = kkt_allocation(scenario, alpha, beta)
        mu = math.fsum(np.sqrt(ratio).tolist()) ** 2
        return TauResult(tau, 0.0, mu, 0, True, delay_at(tau), feasible=False)

    result = dual_ascent(ratio, fixed, d_req, config, start)
    converged = bool(result.converged[0])
    lam, mu = float(result.lambda_[0]), float(result.mu[0])
    if not converged:
        logger.warning(
            "Dual iterations stopped after %d steps without converging (lambda=%.4g, mu=%.4g)",
            result.iterations,
            lam,
            mu,
        )
    shares = result.tau[0]
    excess = math.fsum(shares.tolist()) - 1.0
    if excess > 0:
        shares[int(np.argmax(shares))] -= excess
    tau = TimeAllocation(np.clip(shares, 0.0, 1.0))
    delay = delay_at(tau)
    return TauResult(tau, lam, mu, result.iterations, converged, delay, delay <= d_req + BUDGET_TOL)
