"""Optimizer settings, strategy families and solution records."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..delay import DelayBreakdown, TimeAllocation
from ..metrics import ThresholdSet


class Strategy(str, Enum):
    PROPOSED = "proposed"
    CASCADE = "cascade"
    DEVICE = "device"
    SERVER = "server"
    PROPOSED_FIXED_TAU = "proposed_fixed_tau"

    @property
    def optimizes_tau(self) -> bool:
        return self is not Strategy.PROPOSED_FIXED_TAU

    @property
    def runs_device_inference(self) -> bool:
        return self is not Strategy.SERVER


class OptimizerConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kappa1: float = Field(0.1, gt=0, description="Step size of the delay multiplier")
    kappa2: float = Field(0.1, gt=0, description="Step size of the airtime multiplier")
    kappa_decay: float = Field(0.99, gt=0, le=1, description="Geometric step decay per inner iteration")
    epsilon: float = Field(1e-6, gt=0)
    grid_points_m: int = Field(101, ge=2)
    max_inner_iters: int = Field(10_000, gt=0)
    max_outer_iters: int = Field(50, gt=0)
    max_greedy_rounds: int = Field(100, gt=0)
    max_combinations: int = Field(5_000_000, gt=0)
    d_req_s: float | None = Field(None, gt=0, description="Overrides the scenario delay budget")

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_points_m)


@dataclass(frozen=True)
class Diagnostics:
    lambda_: float = 0.0
    mu: float = 1.0
    inner_iterations: int = 0
    converged: bool = True
    min_delay_s: float | None = None
    threshold_passes: int = 0
    history: tuple[dict[str, float], ...] = ()


@dataclass(frozen=True)
class Solution:
    strategy: Strategy
    thresholds: ThresholdSet
    tau: TimeAllocation
    sum_accuracy: float
    per_device_accuracy: np.ndarray
    mean_delay_s: float
    breakdown: DelayBreakdown
    d_req_s: float
    outer_iterations: int
    feasible: bool
    objective_trace: tuple[float, ...] = ()
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    @property
    def mean_accuracy(self) -> float:
        return self.sum_accuracy / self.thresholds.n_devices

    def summary(self) -> dict[str, Any]:
        return {
            "strategy": self.strategy.value,
            "sum_accuracy": self.sum_accuracy,
            "mean_accuracy": self.mean_accuracy,
            "delay_s": self.mean_delay_s,
            "d_req_s": self.d_req_s,
            "feasible": self.feasible,
            "outer_iterations": self.outer_iterations,
            "theta_l": self.thresholds.theta_l.tolist(),
            "theta_h": self.thresholds.theta_h.tolist(),
            "theta_s": self.thresholds.theta_s.tolist(),
            "tau": self.tau.tau.tolist(),
            "min_delay_s": self.diagnostics.min_delay_s,
        }
