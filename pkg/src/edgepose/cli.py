"""Typer CLI for edgepose studies."""

from __future__ import annotations

import shutil
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
import typer
from rich.table import Table

from .config import ScenarioFile, load_scenario_file
from .confidence import describe_samples, fit_beta_moments, load_samples
from .console import configure_logging, console, err_console
from .db import session as db_session
from .db.session import init_db
from .errors import InfeasibleError
from .metrics import ThresholdSet, offload_profile, per_device_accuracy
from .optimizer import Solution, Strategy, diagnostics_frame, kkt_allocation, optimize
from .reports import build_run_summary, sweep_figure, write_csv, write_plot
from .runs import (
    RunContext,
    create_run,
    load_run,
    record_simulation,
    record_solution,
    record_sweep,
    update_run_stage,
)
from .sim import (
    AXES,
    default_lemma_sweep,
    simulate as run_simulation,
    sweep as run_sweep,
    threshold_curve as run_threshold_curve,
    threshold_map as run_threshold_map,
    validate_lemma1,
)

app = typer.Typer(help="Edgepose CLI: cooperative device/edge-server 3D pose inference studies")

EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3

_state = {"record": False}

SCENARIO_HELP = "Scenario file (key = value text or YAML); defaults apply when omitted"


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
    record: bool = typer.Option(False, "--record", help="Store results in the run registry"),
) -> None:
    configure_logging(verbose)
    _state["record"] = record


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except InfeasibleError as exc:
        err_console.print(f"[red]infeasible:[/red] {exc} (least achievable delay {exc.min_delay_s:.6g} s)")
        raise typer.Exit(EXIT_INFEASIBLE) from None
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        err_console.print(f"[red]numerical failure:[/red] {exc}")
        raise typer.Exit(EXIT_NUMERICAL) from None
    except (ValueError, OSError) as exc:
        err_console.print(f"[red]error:[/red] {exc}")
        raise typer.Exit(EXIT_INPUT) from None


def _load(path: Optional[Path]) -> ScenarioFile:
    return load_scenario_file(path) if path is not None else ScenarioFile()


def _provenance(doc: ScenarioFile, command: str, **extra: object) -> list[str]:
    lines = [f"command = {command}"]
    lines.extend(f"{k} = {v}" for k, v in extra.items())
    lines.extend(doc.provenance())
    return lines


def _start_run(doc: ScenarioFile, command: str, **extra: object) -> RunContext | None:
    if not _state["record"]:
        return None
    params = {"scenario": doc.model_dump(), **{k: str(v) for k, v in extra.items()}}
    return create_run(command, params=params, scenario_hash=doc.digest())


def _complete(run: RunContext | None, command: str) -> None:
    if run is not None:
        update_run_stage(run.run_id, f"{command}_completed")
        console.print(f"[cyan]Recorded run {run.run_id}[/cyan]")


def _table(frame: pd.DataFrame, title: str | None = None) -> Table:
    table = Table(title=title)
    for column in frame.columns:
        table.add_column(str(column), justify="right")
    for row in frame.itertuples(index=False):
        table.add_row(*(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    return table


def _emit(frame: pd.DataFrame, output: Optional[Path], provenance: list[str], title: str) -> None:
    console.print(_table(frame, title))
    if output is not None:
        write_csv(frame, output, provenance)
        console.print(f"[green]Wrote {output}[/green]")


def _parse_values(raw: str) -> list[float]:
    try:
        values = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"cannot parse {raw!r} as a comma-separated list of numbers") from None
    if not values:
        raise ValueError("at least one value is required")
    return values


def _parse_strategies(raw: str) -> list[Strategy]:
    try:
        return [Strategy(s.strip()) for s in raw.split(",") if s.strip()]
    except ValueError:
        choices = ", ".join(s.value for s in Strategy)
        raise ValueError(f"unknown strategy in {raw!r}; choose from {choices}") from None


def _print_solution(solution: Solution) -> None:
    table = Table(title=f"{solution.strategy.value} solution")
    for column in ("device", "theta_l", "theta_h", "theta_s", "tau", "accuracy"):
        table.add_column(column, justify="right")
    th = solution.thresholds
    for i in range(th.n_devices):
        table.add_row(
            str(i),
            f"{th.theta_l[i]:.4g}",
            f"{th.theta_h[i]:.4g}",
            f"{th.theta_s[i]:.4g}",
            f"{solution.tau.tau[i]:.6g}",
            f"{solution.per_device_accuracy[i]:.6g}",
        )
    console.print(table)
    breakdown = Table(title="delay breakdown (s)")
    breakdown.add_column("component")
    breakdown.add_column("seconds", justify="right")
    for name, value in solution.breakdown.as_dict().items():
        breakdown.add_row(name, f"{value:.6g}")
    console.print(breakdown)
    status = "[green]feasible[/green]" if solution.feasible else "[red]infeasible[/red]"
    console.print(
        f"sum accuracy {solution.sum_accuracy:.9g}  delay {solution.mean_delay_s:.6g} s "
        f"(budget {solution.d_req_s:.6g} s)  {status}"
    )


@app.command("optimize")
def optimize_cmd(
    scenario: Optional[Path] = typer.Argument(None, help=SCENARIO_HELP),
    strategy: Strategy = typer.Option(Strategy.PROPOSED, help="Threshold family to optimise"),
    output: Optional[Path] = typer.Option(None, help="Diagnostics CSV (iter,sum_acc,delay_s,lambda,mu)"),
) -> None:
    """Run the alternating threshold/airtime optimisation."""
    with _exit_codes():
        doc = _load(scenario)
        solution = optimize(doc.to_scenario(), doc.optimizer_config(), strategy)
        _print_solution(solution)
        run = _start_run(doc, "optimize", strategy=strategy.value)
        if run is not None:
            record_solution(run.run_id, solution)
            _complete(run, "optimize")
        if output is not None:
            provenance = _provenance(doc, "optimize", strategy=strategy.value)
            write_csv(diagnostics_frame(solution), output, provenance)
            console.print(f"[green]Wrote {output}[/green]")
        if not solution.feasible:
            raise InfeasibleError(
                f"no {strategy.value} operating point meets the {solution.d_req_s:.6g} s budget",
                min_delay_s=solution.diagnostics.min_delay_s or solution.mean_delay_s,
            )


@app.command()
def compare(
    scenario: Optional[Path] = typer.Argument(None, help=SCENARIO_HELP),
    output: Optional[Path] = typer.Option(None, help="CSV path for the comparison table"),
) -> None:
    """Optimise every strategy and tabulate accuracy, delay and feasibility."""
    with _exit_codes():
        doc = _load(scenario)
        target = doc.to_scenario()
        config = doc.optimizer_config()
        run = _start_run(doc, "compare")
        rows = []
        for strategy in Strategy:
            solution = optimize(target, config, strategy)
            if run is not None:
                record_solution(run.run_id, solution)
            rows.append(
                {
                    "strategy": strategy.value,
                    "sum_accuracy": solution.sum_accuracy,
                    "mean_accuracy": solution.mean_accuracy,
                    "delay_s": solution.mean_delay_s,
                    "feasible": solution.feasible,
                    **solution.breakdown.as_dict(),
                }
            )
        frame = pd.DataFrame(rows)
        _emit(frame, output, _provenance(doc, "compare"), "strategy comparison")
        _complete(run, "compare")


@app.command()
def sweep(
    scenario: Optional[Path] = typer.Argument(None, help=SCENARIO_HELP),
    axis: str = typer.Option(..., help=f"One of {', '.join(AXES)}"),
    values: str = typer.Option(..., help="Comma-separated axis values (seconds, count, dB, bytes, seconds)"),
    strategies: str = typer.Option("proposed,cascade,device,server", help="Comma-separated strategies"),
    frames: int = typer.Option(0, min=0, help="Simulated frames per point (0 = analytic only)"),
    output: Optional[Path] = typer.Option(None, help="CSV path for the sweep table"),
    plot: Optional[Path] = typer.Option(None, help="HTML plot with quality and delay panels"),
) -> None:
    """Optimise each strategy across one scenario axis."""
    with _exit_codes():
        if axis not in AXES:
            raise ValueError(f"unknown axis {axis!r}; choose from {', '.join(AXES)}")
        axis_values = _parse_values(values)
        chosen = _parse_strategies(strategies)
        doc = _load(scenario)
        frame = run_sweep(
            doc.to_scenario(), axis, axis_values, chosen, doc.optimizer_config(), frames=frames
        )
        extra = {"axis": axis, "values": values, "strategies": strategies, "frames": frames}
        _emit(frame, output, _provenance(doc, "sweep", **extra), f"sweep over {axis}")
        if plot is not None:
            write_plot(sweep_figure(frame, axis), plot)
            console.print(f"[green]Wrote {plot}[/green]")
        run = _start_run(doc, "sweep", **extra)
        if run is not None:
            record_sweep(run.run_id, axis, frame)
            _complete(run, "sweep")


@app.command()
def simulate(
    scenario: Optional[Path] = typer.Argument(None, help=SCENARIO_HELP),
    frames: int = typer.Option(10_000, min=1, help="Frames to simulate"),
    theta_l: Optional[float] = typer.Option(None, help="Shared lower threshold (needs all three)"),
    theta_h: Optional[float] = typer.Option(None, help="Shared upper threshold"),
    theta_s: Optional[float] = typer.Option(None, help="Shared server threshold"),
    strategy: Strategy = typer.Option(Strategy.PROPOSED, help="Strategy optimised when no thresholds are given"),
    threads: Optional[int] = typer.Option(None, min=1, help="Fan-out width (defaults to EDGEPOSE_THREADS)"),
    output: Optional[Path] = typer.Option(None, help="CSV path for the per-device report"),
) -> None:
    """Monte Carlo run of the full pipeline, side by side with the analytic model."""
    with _exit_codes():
        given = [t for t in (theta_l, theta_h, theta_s) if t is not None]
        if given and len(given) != 3:
            raise ValueError("pass all of --theta-l, --theta-h and --theta-s, or none")
        doc = _load(scenario)
        target = doc.to_scenario()
        if given:
            thresholds = ThresholdSet.uniform(target.n_devices, *given)
            tau = kkt_allocation(target, *offload_profile(target.quads, thresholds))
        else:
            solution = optimize(target, doc.optimizer_config(), strategy)
            thresholds, tau = solution.thresholds, solution.tau
        result = run_simulation(target, thresholds, tau, frames, strategy=strategy, threads=threads)
        alpha, beta = offload_profile(target.quads, thresholds)
        frame = pd.DataFrame(
            {
                "device": np.arange(target.n_devices),
                "empirical_accuracy": result.per_device_accuracy,
                "analytic_accuracy": per_device_accuracy(target.quads, thresholds),
                "alpha_hat": result.alpha_hat,
                "alpha": alpha,
                "beta_hat": result.beta_hat,
                "beta": beta,
            }
        )
        provenance = _provenance(doc, "simulate", frames=frames, strategy=strategy.value)
        _emit(frame, output, provenance, "empirical vs analytic")
        for key, value in result.summary().items():
            console.print(f"{key}: {value:.6g}" if isinstance(value, float) else f"{key}: {value}")
        run = _start_run(doc, "simulate", frames=frames)
        if run is not None:
            record_simulation(run.run_id, result)
            _complete(run, "simulate")


@app.command()
def fit(
    dist_name: str = typer.Argument(..., help="Label of the distribution, e.g. dev_pos"),
    samples: Path = typer.Argument(..., help="Score file, one value in [0, 1] per line"),
    beta: bool = typer.Option(False, "--beta", help="Also print a method-of-moments beta fit"),
) -> None:
    """Summarise measured confidence scores for use in a scenario file."""
    with _exit_codes():
        values = load_samples(samples)
        summary = describe_samples(values)
        console.print(f"[bold]{dist_name}[/bold] from {samples}")
        for key, value in summary.items():
            if isinstance(value, list):
                console.print(f"{key}: " + ", ".join(f"{v:.4g}" for v in value))
            else:
                console.print(f"{key}: {value:.6g}" if isinstance(value, float) else f"{key}: {value}")
        if beta:
            model = fit_beta_moments(values)
            console.print(f"beta fit: {dist_name} = beta({model.alpha:.6g},{model.beta:.6g})")
        else:
            console.print(f"scenario entry: {dist_name} = file({samples})")


@app.command("threshold-map")
def threshold_map(
    scenario: Optional[Path] = typer.Argument(None, help=SCENARIO_HELP),
    theta_s: float = typer.Option(0.3, min=0.0, max=1.0, help="Server threshold shared by every device"),
    grid_points: int = typer.Option(21, min=2, help="Grid points per threshold"),
    output: Optional[Path] = typer.Option(None, help="CSV path for the map"),
) -> None:
    """Mean accuracy and delay over every shared (theta_l, theta_h) pair."""
    with _exit_codes():
        doc = _load(scenario)
        frame = run_threshold_map(doc.to_scenario(), theta_s, grid_points)
        provenance = _provenance(doc, "threshold-map", theta_s=theta_s, grid_points=grid_points)
        _emit(frame, output, provenance, f"threshold map at theta_s = {theta_s:g}")


@app.command("threshold-curve")
def threshold_curve(
    scenario: Optional[Path] = typer.Argument(None, help=SCENARIO_HELP),
    grid_points: int = typer.Option(21, min=2, help="Threshold grid points"),
    frames: int = typer.Option(0, min=0, help="Simulated frames per point (0 = analytic only)"),
    output: Optional[Path] = typer.Option(None, help="CSV path for the curves"),
) -> None:
    """Device-centric and server-centric accuracy as a single threshold moves."""
    with _exit_codes():
        doc = _load(scenario)
        frame = run_threshold_curve(doc.to_scenario(), grid_points, frames)
        provenance = _provenance(doc, "threshold-curve", grid_points=grid_points, frames=frames)
        _emit(frame, output, provenance, "single-threshold curves")


@app.command()
def validate(
    scenario: Optional[Path] = typer.Argument(None, help=SCENARIO_HELP),
    points: int = typer.Option(25, min=2, help="Threshold sets in the sweep"),
    frames: int = typer.Option(5000, min=1, help="Simulated frames per threshold set"),
    metric: str = typer.Option("effective", help="effective or triangulated MPJPE"),
    output: Optional[Path] = typer.Option(None, help="CSV path for the sweep table"),
) -> None:
    """Rank-correlate the analytic accuracy sum with simulated pose error."""
    with _exit_codes():
        if metric not in ("effective", "triangulated"):
            raise ValueError("metric must be 'effective' or 'triangulated'")
        doc = _load(scenario)
        target = doc.to_scenario()
        frame, rho = validate_lemma1(
            target, default_lemma_sweep(target.n_devices, points), frames, metric=metric  # type: ignore[arg-type]
        )
        provenance = _provenance(doc, "validate", points=points, frames=frames, metric=metric)
        _emit(frame, output, provenance, "accuracy vs pose error")
        console.print("spearman rho: " + ("undefined" if rho is None else f"{rho:.6g}"))


@app.command()
def initdb() -> None:
    """Create the run registry schema."""
    init_db()
    console.print(f"[green]Database initialized at {db_session.DB_PATH}[/green]")


@app.command()
def report(run_id: str = typer.Argument(..., help="Run identifier")) -> None:
    """Print everything recorded for one run."""
    with _exit_codes():
        console.print_json(data=build_run_summary(run_id))


@app.command()
def snapshot(
    run_id: str = typer.Argument(..., help="Run identifier to snapshot"),
    output: Optional[Path] = typer.Option(None, help="Optional output path"),
) -> None:
    """Copy the registry database for archiving next to a run's outputs."""
    with _exit_codes():
        run = load_run(run_id)
        db_path = db_session.DB_PATH
        if not db_path.exists():
            raise ValueError(f"Database {db_path} not found")
        artifacts_dir = Path("artifacts")
        dest = output if output else artifacts_dir / f"run_{run.run_id}.db"
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy(db_path, dest)
        console.print(f"[green]Snapshot saved to {dest}[/green]")


if __name__ == "__main__":
    app()
