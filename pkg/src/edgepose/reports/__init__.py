"""Reporting utilities."""

from .run_summary import build_run_summary
from .tables import FLOAT_FORMAT, PLOT_DIV_ID, read_csv, render_csv, sweep_figure, write_csv, write_plot

__all__ = [
    "FLOAT_FORMAT",
    "PLOT_DIV_ID",
    "build_run_summary",
    "read_csv",
    "render_csv",
    "sweep_figure",
    "write_csv",
    "write_plot",
]
