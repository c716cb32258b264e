"""Deterministic CSV and plot emission."""

from __future__ import annotations

import io
from collections.abc import Sequence
from pathlib import Path

import pandas as pd
import plotly.graph_objects as go
from plotly.subplots import make_subplots

FLOAT_FORMAT = "%.9g"
PLOT_DIV_ID = "edgepose-sweep"


def render_csv(frame: pd.DataFrame, provenance: Sequence[str] = ()) -> str:
    """CSV text preceded by ``# key = value`` provenance lines."""
    buffer = io.StringIO()
    for line in provenance:
        buffer.write(f"# {line}\n")
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def write_csv(frame: pd.DataFrame, path: str | Path, provenance: Sequence[str] = ()) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(render_csv(frame, provenance), encoding="utf-8")
    return out


def read_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def sweep_figure(frame: pd.DataFrame, axis: str) -> go.Figure:
    """MPJPE (or accuracy when nothing was simulated) and delay panels, one trace per strategy."""
    quality = "mpjpe_m" if frame["mpjpe_m"].notna().any() else "sum_accuracy"
    fig = make_subplots(rows=1, cols=2, subplot_titles=(quality, "delay_s"))
    for strategy, group in frame.groupby("strategy", sort=False):
        for col, column in enumerate((quality, "delay_s"), start=1):
            fig.add_trace(
                go.Scatter(
                    x=group["axis_value"],
                    y=group[column],
                    mode="lines+markers",
                    name=str(strategy),
                    legendgroup=str(strategy),
                    showlegend=col == 1,
                ),
                row=1,
                col=col,
            )
    fig.update_xaxes(title_text=axis)
    fig.update_layout(template="plotly_white")
    return fig


def write_plot(fig: go.Figure, path: str | Path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(
        fig.to_html(include_plotlyjs="cdn", full_html=True, div_id=PLOT_DIV_ID),
        encoding="utf-8",
    )
    return out
