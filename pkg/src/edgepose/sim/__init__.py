"""Scenario definition, Monte Carlo simulation and parameter sweeps."""

from .frames import FrameBatch, generate_frames, random_poses, skeleton_template
from .rig import generate_rig, rig_positions
from .scenario import Scenario, draw_gains
from .simulator import SimResult, analytic_drop_rate, simulate
from .sweep import (
    AXES,
    CURVE_COLUMNS,
    MAP_COLUMNS,
    SWEEP_COLUMNS,
    apply_axis,
    sweep,
    threshold_curve,
    threshold_map,
)
from .validation import LEMMA_COLUMNS, default_lemma_sweep, rank_correlation, validate_lemma1

__all__ = [
    "AXES",
    "CURVE_COLUMNS",
    "FrameBatch",
    "LEMMA_COLUMNS",
    "MAP_COLUMNS",
    "SWEEP_COLUMNS",
    "Scenario",
    "SimResult",
    "analytic_drop_rate",
    "apply_axis",
    "default_lemma_sweep",
    "draw_gains",
    "generate_frames",
    "generate_rig",
    "random_poses",
    "rank_correlation",
    "rig_positions",
    "simulate",
    "skeleton_template",
    "sweep",
    "threshold_curve",
    "threshold_map",
    "validate_lemma1",
]
