from __future__ import annotations

import math
from dataclasses import dataclass

from backend.cbvf_solver import SolveConfig, TVD_RK3
from backend.safety_controllers import CBVF_QP
from backend.simulation import ZERO
from backend.state_grid import GridSpec

from .target_shapes import ShapeSpec, parse_shape

DEFAULT_SCENE_NOTE = "reconstructed scene"
DEFAULT_OUTPUT_ROOT = "output"
DEFAULT_REFERENCES = {
    "double_integrator": "pd",
    "dubins_car": "heading",
}
DEFAULT_GAINS = {
    "pd": (1.0, 1.5),
    "heading": (3.0,),
    "zero": (),
}


@dataclass(frozen=True)
class Scene:
    """Grid, safety target and goal used when a file does not set them."""

    grid_lo: tuple
    grid_hi: tuple
    grid_n: tuple
    target: ShapeSpec
    goal: tuple


DEFAULT_SCENES = {
    # Constraint box z in [-1, 5], v in [-2, 2] inside a larger grid.
    "double_integrator": Scene(
        grid_lo=(-1.5, -2.5),
        grid_hi=(5.5, 2.5),
        grid_n=(161, 161),
        target=parse_shape("box(lo=[-1, -2], hi=[5, 2])"),
        goal=(-0.4, 0.0),
    ),
    # Round obstacle at the origin, arena walls, and a dead-end corridor
    # holding the goal.
    "dubins_car": Scene(
        grid_lo=(-4.0, -4.0, 0.0),
        grid_hi=(4.0, 4.0, 2 * math.pi),
        grid_n=(81, 81, 60),
        target=parse_shape(
            "max_of("
            "min_of(box(lo=[-4, -4], hi=[2.5, 4]), circle_complement(center=[0, 0], radius=1)), "
            "box(lo=[2.0, -0.25], hi=[3.6, 0.25]))"
        ),
        goal=(3.0, 0.0),
    ),
    "single_integrator_1d": Scene(
        grid_lo=(-2.0,),
        grid_hi=(2.0,),
        grid_n=(201,),
        target=parse_shape("box(lo=[-1], hi=[1])"),
        goal=(0.0,),
    ),
}


@dataclass
class Experiment:
    """
    Every setting of one experiment file. Settings left as None take
    their defaults through the ``resolved_*`` helpers, so that formatting
    an experiment writes back only what the file said.
    """

    model: str
    speed: float = 1.0
    u_max: float = 1.0
    d_max: float = 0.0
    label: str = None
    scene_note: str = DEFAULT_SCENE_NOTE
    grid_lo: tuple = None
    grid_hi: tuple = None
    grid_n: tuple = None
    grid_periodic: tuple = None
    target: ShapeSpec = None
    gamma: tuple = (0.0,)
    horizon: float = -5.0
    cfl: float = 0.5
    time_scheme: str = TVD_RK3
    store_stride: int = 0
    stationary_tol: float = 1e-6
    max_steps: int = 100000
    controllers: tuple = (CBVF_QP,)
    reference: str = None
    reference_gains: tuple = None
    epsilon: float = None
    goal: tuple = None
    goal_radius: float = 0.3
    x0: tuple = ()
    random_starts: int = 0
    t0: float = None
    dt_sim: float = None
    disturbance: tuple = (ZERO,)
    disturbance_vector: tuple = None
    plot_slice: tuple = None
    output_dir: str = None
    seed: int = 0

    @property
    def scene(self) -> Scene:
        return DEFAULT_SCENES[self.model]

    @property
    def resolved_label(self) -> str:
        return self.label if self.label is not None else self.model

    @property
    def resolved_grid_lo(self) -> tuple:
        return self.grid_lo if self.grid_lo is not None else self.scene.grid_lo

    @property
    def resolved_grid_hi(self) -> tuple:
        return self.grid_hi if self.grid_hi is not None else self.scene.grid_hi

    @property
    def resolved_grid_n(self) -> tuple:
        return self.grid_n if self.grid_n is not None else self.scene.grid_n

    @property
    def resolved_target(self) -> ShapeSpec:
        return self.target if self.target is not None else self.scene.target

    @property
    def resolved_goal(self) -> tuple:
        return self.goal if self.goal is not None else self.scene.goal

    def resolved_periodic(self, default_dims: tuple = ()) -> tuple:
        if self.grid_periodic is not None:
            return tuple(self.grid_periodic)
        return tuple(i in default_dims for i in range(len(self.resolved_grid_lo)))

    @property
    def resolved_reference(self) -> str:
        if self.reference is not None:
            return self.reference
        return DEFAULT_REFERENCES.get(self.model, "zero")

    @property
    def resolved_gains(self) -> tuple:
        if self.reference_gains is not None:
            return tuple(self.reference_gains)
        return DEFAULT_GAINS[self.resolved_reference]

    @property
    def resolved_t0(self) -> float:
        return self.t0 if self.t0 is not None else self.horizon

    def resolved_output_dir(self, override: str = None) -> str:
        """``override`` (from the environment) wins over the file's setting."""
        if override:
            return override
        if self.output_dir is not None:
            return self.output_dir
        return f"{DEFAULT_OUTPUT_ROOT}/{self.resolved_label}"

    def grid_spec(self, default_periodic_dims: tuple = ()) -> GridSpec:
        return GridSpec(
            lo=self.resolved_grid_lo,
            hi=self.resolved_grid_hi,
            n=self.resolved_grid_n,
            periodic=self.resolved_periodic(default_periodic_dims),
        )

    def solve_config(self, gamma: float) -> SolveConfig:
        return SolveConfig(
            gamma=gamma,
            horizon=self.horizon,
            cfl=self.cfl,
            time_scheme=self.time_scheme,
            store_stride=self.store_stride,
            stationary_tol=self.stationary_tol,
            max_steps=self.max_steps,
        )

    def stationary_config(self) -> SolveConfig:
        return self.solve_config(0.0)


__all__ = [
    "DEFAULT_SCENE_NOTE",
    "DEFAULT_REFERENCES",
    "DEFAULT_GAINS",
    "Scene",
    "DEFAULT_SCENES",
    "Experiment",
]
