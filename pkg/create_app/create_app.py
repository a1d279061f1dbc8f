from __future__ import annotations

import logging
from pathlib import Path

import click
from flask import Flask

from backend.database import export_level_sets_csv, import_value_function
from backend.experiment import (
    ExperimentController,
    exit_code_for,
    parse_experiment_config,
    run_experiment,
)
from backend.level_set import extract_level_set
from backend.metrics import MetricsController
from backend.safety_controllers import RELAXATION_COUNTER
from backend.state_grid import slice_field
from backend.summarize import format_summary, summarize_value_function
from backend.value_function_controller import CACHE_HITS, SOLVES

from .config import Config


def _parse_slice(text: str) -> tuple[int, float]:
    """Parse ``dim=value`` (e.g., ``2=1.57``)."""
    dim, sep, value = text.partition("=")
    if not sep:
        raise click.BadParameter(f"Expected dim=value, got {text!r}.", param_hint="--slice")
    try:
        return int(dim), float(value)
    except ValueError:
        raise click.BadParameter(
            f"Expected dim=value, got {text!r}.", param_hint="--slice"
        ) from None


def create_app(config: Config = None) -> Flask:
    """
    Build the application. Its ``cli`` group carries the experiment
    commands; ``app.logger`` is handed to every controller they use and
    ``app.metrics`` tallies solves, cache hits and QP relaxations.

    :param config: Settings object (``Config`` if not given).
    """
    if config is None:
        config = Config
    app = Flask(__name__)
    app.config.from_object(config)
    app.logger.setLevel(getattr(logging, config.CBVF_LOG_LEVEL, logging.INFO))

    # Register metrics.
    app.metrics = MetricsController(app)
    app.metrics.new(SOLVES, data_type=int)
    app.metrics.new(CACHE_HITS, data_type=int)
    app.metrics.new(RELAXATION_COUNTER, data_type=int)

    def load_experiment(config_path: str):
        text = Path(config_path).read_text(encoding="utf-8")
        return parse_experiment_config(text)

    def experiment_controller(exp) -> ExperimentController:
        return ExperimentController(
            exp,
            exp.resolved_output_dir(config.CBVF_OUTPUT_DIR),
            logger=app.logger,
            tally=app.metrics,
            reuse_stored=config.CBVF_CACHE_SOLVES,
        )

    def guarded(fn, *args) -> None:
        """
        Run a command body, converting the failures with an assigned exit
        status into that status.
        """
        try:
            fn(*args)
            tallies = ", ".join(f"{k}={v}" for k, v in app.metrics.snapshot().items())
            app.logger.log(logging.INFO, f"Done in {app.metrics.elapsed} ({tallies}).")
        except Exception as e:
            code = exit_code_for(e)
            if code is None:
                raise
            app.logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"Error: {e}", err=True)
            click.get_current_context().exit(code)

    @app.cli.command("solve", with_appcontext=False)
    @click.argument("config_path", type=click.Path(dir_okay=False))
    def solve(config_path):
        """Solve (or load) every value function of an experiment."""

        def body():
            controller = experiment_controller(load_experiment(config_path))
            controller.solve()
            click.echo(f"Value functions are in {controller.output_dir}.")

        guarded(body)

    @app.cli.command("simulate", with_appcontext=False)
    @click.argument("config_path", type=click.Path(dir_okay=False))
    def simulate(config_path):
        """Solve, roll out every controller, and write all CSV artifacts."""

        def body():
            exp = load_experiment(config_path)
            run_experiment(
                exp,
                output_dir=config.CBVF_OUTPUT_DIR,
                logger=app.logger,
                tally=app.metrics,
                reuse_stored=config.CBVF_CACHE_SOLVES,
                plots=False,
            )

        guarded(body)

    @app.cli.command("compare", with_appcontext=False)
    @click.argument("config_path", type=click.Path(dir_okay=False))
    def compare(config_path):
        """Run every listed controller and print the metrics table."""

        def body():
            controller = experiment_controller(load_experiment(config_path))
            controller.solve()
            results = controller.simulate_all()
            controller.write_trajectories(results)
            table = controller.write_summary(results)
            click.echo(table.to_string(index=False))

        guarded(body)

    @app.cli.command("plot", with_appcontext=False)
    @click.argument("config_path", type=click.Path(dir_okay=False))
    def plot(config_path):
        """Run the full experiment, SVG plots included."""

        def body():
            exp = load_experiment(config_path)
            run_experiment(
                exp,
                output_dir=config.CBVF_OUTPUT_DIR,
                logger=app.logger,
                tally=app.metrics,
                reuse_stored=config.CBVF_CACHE_SOLVES,
            )

        guarded(body)

    @app.cli.command("levelset", with_appcontext=False)
    @click.argument("vf_path", type=click.Path(dir_okay=False))
    @click.option("--time", "t", type=float, required=True, help="Time of the slice (<= 0).")
    @click.option("--slice", "cut", default=None, help="dim=value for 3D value functions.")
    @click.option("--level", type=float, default=0.0, show_default=True)
    @click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
    def levelset(vf_path, t, cut, level, out_path):
        """Write the level set of a stored value function at one time."""
        plane = _parse_slice(cut) if cut is not None else None

        def body():
            vf = import_value_function(vf_path)
            field = vf.slice_at(t)
            if plane is not None:
                field = slice_field(field, *plane)
            polylines = extract_level_set(field, level)
            export_level_sets_csv({"B": polylines}, out_path)
            app.logger.log(logging.INFO, f"Wrote {out_path}.")
            click.echo(f"{len(polylines)} polyline(s) written to {out_path}.")

        guarded(body)

    @app.cli.command("info", with_appcontext=False)
    @click.argument("vf_path", type=click.Path(dir_okay=False))
    def info(vf_path):
        """Print the header summary of a stored value function."""

        def body():
            vf = import_value_function(vf_path)
            click.echo(format_summary(summarize_value_function(vf)))

        guarded(body)

    return app


__all__ = [
    "create_app",
]
