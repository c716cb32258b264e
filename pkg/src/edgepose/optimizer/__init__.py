"""Joint threshold and airtime optimisation under an end-to-end delay budget."""

from .algorithm import DIAGNOSTIC_COLUMNS, diagnostics_frame, evaluate, exhaustive_search, optimize
from .config import Diagnostics, OptimizerConfig, Solution, Strategy
from .dual import TauResult, kkt_allocation, solve_tau
from .greedy import initial_thresholds, minimum_delay_thresholds, solve_thresholds

__all__ = [
    "DIAGNOSTIC_COLUMNS",
    "Diagnostics",
    "OptimizerConfig",
    "Solution",
    "Strategy",
    "TauResult",
    "diagnostics_frame",
    "evaluate",
    "exhaustive_search",
    "initial_thresholds",
    "kkt_allocation",
    "minimum_delay_thresholds",
    "optimize",
    "solve_tau",
    "solve_thresholds",
]
