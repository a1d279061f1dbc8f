"""
Orchestration of one experiment: solve (or load) the value functions,
roll out every configured controller from every start, and write the
artifacts to the output directory.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from backend.cbvf_solver import (
    CflViolationError,
    NonConvergenceError,
    NumericalFailureError,
    ValueFunction,
    dissipation_bounds,
)
from backend.database import (
    ContainerFormatError,
    FileValueFunctionDataGateway,
    FLOAT_FORMAT,
    export_feasible_csv,
    export_level_sets_csv,
    export_trajectory_csv,
)
from backend.level_set import extract_level_set
from backend.metrics import MetricsController
from backend.plotting import AxisSpec, PointMarker, PolylineLayer, TrajectoryLayer, render_plot_svg
from backend.safety_controllers import (
    CBF_QP,
    CBVF_QP,
    LEAST_RESTRICTIVE,
    OPTIMAL,
    REFERENCE,
    Policy,
    cbf_qp_policy,
    cbvf_qp_policy,
    default_epsilon,
    heading_reference_policy,
    least_restrictive_policy,
    optimal_safe_policy,
    pd_reference_policy,
    zero_reference_policy,
)
from backend.simulation import (
    DisturbanceStrategy,
    Metrics,
    Trajectory,
    make_disturbance,
    simulate,
    trajectory_metrics,
)
from backend.state_grid import ScalarField, build_grid, slice_field
from backend.summarize import metrics_table, summarize_metrics
from backend.system_models import ControlAffineModel, make_model
from backend.value_function_controller import (
    ValueFunctionController,
    run_id_for,
    stationary_run_id_for,
)

from .config_parser import ConfigError
from .experiment import Experiment
from .target_shapes import build_target_field

# Upper bound on the automatic simulation step.
MAX_AUTO_DT_SIM = 0.01
SUMMARY_FILE = "summary.csv"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def exit_code_for(exc: BaseException) -> int | None:
    """
    Exit status for an exception raised while running an experiment, or
    None if it has no assigned status.
    """
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, (NumericalFailureError, NonConvergenceError, CflViolationError)):
        return EXIT_NUMERICAL
    if isinstance(exc, (OSError, ContainerFormatError)):
        return EXIT_IO
    return None


@dataclass
class RunResult:
    """One rollout of one controller from one start, for one gamma."""

    run_id: str
    gamma: float
    controller: str
    disturbance: str
    start_index: int
    trajectory: Trajectory
    metrics: Metrics


class ExperimentController:
    """
    A controller for running an ``Experiment``: value functions come from
    the output directory when already solved for the same request, and
    every artifact is written under that directory.
    """

    def __init__(
        self,
        exp: Experiment,
        output_dir: str | Path,
        logger: logging.Logger = None,
        tally: MetricsController = None,
        reuse_stored: bool = True,
    ) -> None:
        self.exp: Experiment = exp
        self.output_dir: Path = Path(output_dir)
        self.logger: logging.Logger = logger
        self.tally: MetricsController = tally
        self.reuse_stored: bool = reuse_stored
        self.vf_controller = ValueFunctionController(
            gateway=FileValueFunctionDataGateway(self.output_dir),
            logger=logger,
            tally=tally,
        )
        self.model: ControlAffineModel = make_model(
            exp.model, speed=exp.speed, u_max=exp.u_max, d_max=exp.d_max
        )
        self.grid = build_grid(exp.grid_spec(self.model.periodic_dims))
        self.l_field: ScalarField = build_target_field(exp.resolved_target, self.grid)
        self._value_functions: dict[float, ValueFunction] = {}
        self._stationary: ScalarField = None

    def _log(self, msg: str) -> None:
        if self.logger is not None:
            self.logger.log(logging.INFO, msg)

    @property
    def label(self) -> str:
        return self.exp.resolved_label

    def value_function(self, gamma: float) -> ValueFunction:
        """The finite-horizon value function for ``gamma``."""
        if gamma not in self._value_functions:
            self._value_functions[gamma] = self.vf_controller.get_value_function(
                run_id_for(self.label, gamma),
                self.model,
                self.l_field,
                self.exp.solve_config(gamma),
                reuse_stored=self.reuse_stored,
            )
        return self._value_functions[gamma]

    def value_functions(self) -> dict[float, ValueFunction]:
        return {gamma: self.value_function(gamma) for gamma in self.exp.gamma}

    def stationary_field(self) -> ScalarField:
        """The infinite-horizon value (used by the CBF-QP controller)."""
        if self._stationary is None:
            self._stationary = self.vf_controller.get_stationary_field(
                stationary_run_id_for(self.label),
                self.model,
                self.l_field,
                self.exp.stationary_config(),
                reuse_stored=self.reuse_stored,
            )
        return self._stationary

    def solve(self) -> None:
        """Solve (or load) every value function the experiment needs."""
        self.value_functions()
        if CBF_QP in self.exp.controllers:
            self.stationary_field()

    def dt_sim(self) -> float:
        if self.exp.dt_sim is not None:
            return self.exp.dt_sim
        alpha = dissipation_bounds(self.model, self.grid)
        rate = float(np.sum(alpha / self.grid.dx))
        solver_dt = self.exp.cfl / rate if rate > 0 else math.inf
        return min(MAX_AUTO_DT_SIM, solver_dt)

    def epsilon(self, vf: ValueFunction) -> float:
        return self.exp.epsilon if self.exp.epsilon is not None else default_epsilon(vf)

    def reference_policy(self) -> Policy:
        kind = self.exp.resolved_reference
        gains = self.exp.resolved_gains
        if kind == "pd":
            return pd_reference_policy(self.model, self.exp.resolved_goal, gains)
        if kind == "heading":
            return heading_reference_policy(self.model, self.exp.resolved_goal, gains[0])
        return zero_reference_policy(self.model)

    def policy(self, kind: str, gamma: float) -> Policy:
        vf = self.value_function(gamma)
        reference = self.reference_policy()
        if kind == CBVF_QP:
            return cbvf_qp_policy(vf, self.model, gamma, reference, self.tally, self.logger)
        if kind == CBF_QP:
            return cbf_qp_policy(
                self.stationary_field(), self.model, gamma, reference, self.tally, self.logger
            )
        if kind == OPTIMAL:
            return optimal_safe_policy(vf, self.model)
        if kind == LEAST_RESTRICTIVE:
            return least_restrictive_policy(vf, self.model, reference, self.epsilon(vf))
        if kind == REFERENCE:
            return reference
        raise ValueError(f"Unknown controller kind {kind!r}.")

    def disturbance(self, kind: str, gamma: float) -> DisturbanceStrategy:
        return make_disturbance(
            kind,
            self.model,
            vf=self.value_function(gamma),
            vector=self.exp.disturbance_vector,
        )

    def starts(self) -> list[np.ndarray]:
        """
        The configured start states, then ``random_starts`` grid nodes
        drawn (seeded) from where the first gamma's value at ``t0`` is at
        least the switching threshold.
        """
        starts = [np.array(x, dtype=float) for x in self.exp.x0]
        count = self.exp.random_starts
        if count:
            vf = self.value_function(self.exp.gamma[0])
            values = vf.slice_at(self.exp.resolved_t0).values.ravel()
            candidates = np.flatnonzero(values >= self.epsilon(vf))
            rng = np.random.default_rng(self.exp.seed)
            chosen = rng.choice(candidates, size=min(count, candidates.size), replace=False)
            nodes = self.grid.states.reshape(-1, self.grid.ndim)
            starts.extend(np.array(nodes[i]) for i in chosen)
        return starts

    def simulate_all(self) -> list[RunResult]:
        """Every (gamma, controller, disturbance, start) rollout, in that order."""
        results = []
        starts = self.starts()
        t0 = self.exp.resolved_t0
        dt_sim = self.dt_sim()
        for gamma in self.exp.gamma:
            vf = self.value_function(gamma)
            for kind in self.exp.controllers:
                policy = self.policy(kind, gamma)
                for dist_kind in self.exp.disturbance:
                    dist = self.disturbance(dist_kind, gamma)
                    for k, x0 in enumerate(starts):
                        run_id = f"{run_id_for(self.label, gamma)}_{kind}_{dist_kind}_x{k}"
                        traj = simulate(
                            self.model,
                            policy,
                            dist,
                            x0,
                            t0,
                            dt_sim,
                            barrier=vf,
                            l_field=self.l_field,
                            logger=self.logger,
                        )
                        metrics = trajectory_metrics(
                            traj, self.exp.resolved_goal, self.exp.goal_radius
                        )
                        self._log(
                            f"Run {run_id}: min_l={metrics.min_l:.4f}, "
                            f"min_B={metrics.min_B:.4f}, reached={metrics.target_reached}, "
                            f"relaxations={metrics.relaxation_count}."
                        )
                        results.append(
                            RunResult(run_id, gamma, kind, dist_kind, k, traj, metrics)
                        )
        return results

    def _written(self, path: Path) -> None:
        self._log(f"Wrote {path}.")

    def write_trajectories(self, results: list[RunResult]) -> None:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        for result in results:
            path = self.output_dir / f"traj_{result.run_id}.csv"
            export_trajectory_csv(result.trajectory, path)
            self._written(path)
            if result.controller in (CBVF_QP, CBF_QP) and self.model.n_u == 1:
                path = self.output_dir / f"feasible_{result.run_id}.csv"
                export_feasible_csv(result.trajectory, path)
                self._written(path)

    def write_summary(self, results: list[RunResult]) -> pd.DataFrame:
        rows = []
        for result in results:
            row = {
                "run": result.run_id,
                "gamma": result.gamma,
                "controller": result.controller,
                "disturbance": result.disturbance,
                "start": result.start_index,
                "scene": self.exp.scene_note,
            }
            row.update(summarize_metrics(result.metrics))
            rows.append(row)
        table = metrics_table(rows)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / SUMMARY_FILE
        table.to_csv(path, index=False, float_format=FLOAT_FORMAT)
        self._written(path)
        return table

    def plot_slice(self) -> tuple[int, float] | None:
        """Fixed (dimension, value) for plotting 3D fields, or None for 2D."""
        if self.grid.ndim != 3:
            return None
        if self.exp.plot_slice is not None:
            return self.exp.plot_slice
        heading = float(self.exp.x0[0][2]) if self.exp.x0 else 0.0
        return 2, heading

    def _plane(self, field: ScalarField) -> ScalarField | None:
        cut = self.plot_slice()
        if cut is not None:
            return slice_field(field, *cut)
        return field if field.grid.ndim == 2 else None

    def level_sets(self, gamma: float) -> dict[str, list]:
        """Zero level sets of ``l``, ``B`` at ``t0`` and (if used) V-infinity."""
        fields = {
            "l": self.l_field,
            "B": self.value_function(gamma).slice_at(self.exp.resolved_t0),
        }
        if CBF_QP in self.exp.controllers:
            fields["V_inf"] = self.stationary_field()
        out = {}
        for name, field in fields.items():
            plane = self._plane(field)
            if plane is not None:
                out[name] = extract_level_set(plane)
        return out

    def write_level_sets(self) -> None:
        if self.grid.ndim not in (2, 3):
            return
        self.output_dir.mkdir(parents=True, exist_ok=True)
        for gamma in self.exp.gamma:
            path = self.output_dir / f"levelset_{run_id_for(self.label, gamma)}.csv"
            export_level_sets_csv(self.level_sets(gamma), path)
            self._written(path)

    def write_plots(self, results: list[RunResult]) -> None:
        if self.grid.ndim not in (2, 3):
            return
        self.output_dir.mkdir(parents=True, exist_ok=True)
        spec = self.grid.spec
        for gamma in self.exp.gamma:
            run_id = run_id_for(self.label, gamma)
            layers = [
                AxisSpec(
                    x_range=(spec.lo[0], spec.hi[0]),
                    y_range=(spec.lo[1], spec.hi[1]),
                    title=f"{self.label}: gamma = {gamma!r} ({self.exp.scene_note})",
                )
            ]
            for name, polylines in self.level_sets(gamma).items():
                layers.append(PolylineLayer(f"{name} = 0", polylines))
            for result in results:
                if result.gamma != gamma:
                    continue
                points = result.trajectory.states[:, :2]
                layers.append(
                    TrajectoryLayer(
                        f"{result.controller}/{result.disturbance} x{result.start_index}",
                        points,
                    )
                )
            goal = self.exp.resolved_goal
            if len(goal) >= 2:
                layers.append(PointMarker("goal", (goal[0], goal[1])))
            path = self.output_dir / f"plot_{run_id}.svg"
            path.write_text(render_plot_svg(layers), encoding="utf-8")
            self._written(path)


def run_experiment(
    exp: Experiment,
    output_dir: str | Path = None,
    logger: logging.Logger = None,
    tally: MetricsController = None,
    reuse_stored: bool = True,
    plots: bool = True,
) -> int:
    """
    Run every part of an experiment: solve, simulate, and write value
    functions, trajectories, feasible intervals, level sets, plots and
    the summary (last).

    :param output_dir: Overrides the experiment's output directory.
    :return: Exit status 0. Failures propagate as exceptions (see
     ``exit_code_for()``), after being logged with the experiment label.
    """
    directory = exp.resolved_output_dir(str(output_dir) if output_dir else None)
    try:
        controller = ExperimentController(
            exp, directory, logger=logger, tally=tally, reuse_stored=reuse_stored
        )
        controller.solve()
        results = controller.simulate_all()
        controller.write_trajectories(results)
        controller.write_level_sets()
        if plots:
            controller.write_plots(results)
        controller.write_summary(results)
    except Exception as e:
        if logger is not None:
            logger.error(f"Experiment {exp.resolved_label!r} failed: {e}")
        raise
    return EXIT_OK


__all__ = [
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_NUMERICAL",
    "EXIT_IO",
    "SUMMARY_FILE",
    "exit_code_for",
    "RunResult",
    "ExperimentController",
    "run_experiment",
]
