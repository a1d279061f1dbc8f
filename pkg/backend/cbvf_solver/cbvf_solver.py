"""
Backward-in-time solver for the barrier-value variational inequality

    0 = min{ l(x) - B(x, t),  D_t B + max_u min_d D_x B . f(x, u, d) + gamma B }

with terminal condition ``B(x, 0) = l(x)``. In backward time the update
is ``B(t - dt) = min(l, B(t) + dt * (H_lf + gamma B(t)))``, where
``H_lf`` is the Lax-Friedrichs Hamiltonian built from one-sided
differences. With ``gamma = 0`` this is the classical reachability
variational inequality.
"""

from __future__ import annotations

import logging
import math
import time

import numpy as np

from backend.state_grid import Grid, ScalarField, one_sided_differences
from backend.system_models import ControlAffineModel

from .hamiltonian import GridHamiltonian, dissipation_from_terms
from .solve_config import SolveConfig, EULER, MAX_STORED_SLICES
from .value_function import ValueFunction

# Relative slack on the CFL bound. A solve plans its steps within half
# of it, so its last (possibly stretched) step always passes.
_CFL_SLACK = 1e-9

STATIONARY_LOG_INTERVAL = 500


class CflViolationError(ValueError):
    """A requested time step exceeds the stable step size."""

    def __init__(self, dt: float, max_dt: float) -> None:
        super().__init__(
            f"Time step {dt!r} exceeds the CFL bound {max_dt!r}."
        )
        self.dt = dt
        self.max_dt = max_dt


class NumericalFailureError(RuntimeError):
    """Non-finite values appeared during a solve or a rollout."""

    def __init__(self, message: str, step: int = None, node: tuple = None) -> None:
        super().__init__(message)
        self.step = step
        self.node = node


class NonConvergenceError(RuntimeError):
    """The stationary solve did not reach its tolerance within ``max_steps``."""

    def __init__(self, residual: float, steps: int) -> None:
        super().__init__(
            f"Stationary solve did not converge in {steps} steps "
            f"(last residual {residual!r})."
        )
        self.residual = residual
        self.steps = steps


class CbvfSolver:
    """
    Explicit monotone time stepper for one model and safety target on a
    fixed grid. Model terms, dissipation coefficients and the stable step
    size are evaluated once, at construction.
    """

    def __init__(
        self,
        model: ControlAffineModel,
        l_field: ScalarField,
        cfg: SolveConfig,
        logger: logging.Logger = None,
    ) -> None:
        cfg.validate()
        grid = l_field.grid
        if grid.ndim != model.n_x:
            raise ValueError(
                f"Grid has {grid.ndim} dimensions; {model.name!r} has {model.n_x} states."
            )
        self.model: ControlAffineModel = model
        self.l_field: ScalarField = l_field
        self.grid: Grid = grid
        self.cfg: SolveConfig = cfg
        self.logger: logging.Logger = logger
        states = grid.states
        p, q, r = model.p(states), model.q(states), model.r(states)
        self.alpha: np.ndarray = dissipation_from_terms(p, q, r, model.u_box, model.d_box)
        self._hamiltonian = GridHamiltonian(p, q, r, model.u_box, model.d_box)
        rate = float(np.sum(self.alpha / grid.dx))
        self.max_dt: float = cfg.cfl / rate if rate > 0 else math.inf
        # Iteration time covered by the last converged stationary solve.
        self.stationary_elapsed: float = None

    def _log(self, level, msg) -> None:
        if self.logger is not None:
            self.logger.log(level, msg)

    def rate(self, values: np.ndarray, gamma: float) -> np.ndarray:
        """
        ``H_lf + gamma * B`` at every node: the backward-time rate of
        change of the unconstrained update.
        """
        grid = self.grid
        average = []
        out = gamma * values
        for dim in range(grid.ndim):
            minus, plus = one_sided_differences(values, grid, dim)
            average.append(0.5 * (minus + plus))
            out += (0.5 * self.alpha[dim]) * (plus - minus)
        out += self._hamiltonian(average)
        return out

    def _euler(self, values: np.ndarray, dt: float, gamma: float) -> np.ndarray:
        return values + dt * self.rate(values, gamma)

    def advance(self, values: np.ndarray, dt: float, gamma: float) -> np.ndarray:
        """
        One backward step of size ``dt`` from a node array, with the
        obstacle ``min(l, .)`` applied after every substep.

        :raise CflViolationError: if ``dt`` exceeds the stable step.
        """
        if not dt > 0:
            raise ValueError(f"Time step must be positive (got {dt!r}).")
        if dt > self.max_dt * (1.0 + _CFL_SLACK):
            raise CflViolationError(dt, self.max_dt)
        l_values = self.l_field.values
        stage1 = np.minimum(l_values, self._euler(values, dt, gamma))
        if self.cfg.time_scheme == EULER:
            return stage1
        stage2 = np.minimum(
            l_values, 0.75 * values + 0.25 * self._euler(stage1, dt, gamma)
        )
        return np.minimum(
            l_values, values / 3.0 + 2.0 / 3.0 * self._euler(stage2, dt, gamma)
        )

    def _check_finite(self, values: np.ndarray, step: int) -> None:
        bad = ~np.isfinite(values)
        if np.any(bad):
            node = tuple(int(i) for i in np.unravel_index(np.argmax(bad), values.shape))
            msg = f"Non-finite value at node {node} after step {step}."
            if self.logger is not None:
                self.logger.error(msg)
            raise NumericalFailureError(msg, step=step, node=node)

    def nominal_dt(self, span: float) -> float:
        """The step size used for a solve over ``span`` units of time."""
        return self.max_dt if math.isfinite(self.max_dt) else span

    def step_count(self, span: float) -> int:
        """
        Number of steps for a solve over ``span``: full steps of
        ``nominal_dt``, the last one stretched by at most half the CFL
        slack or else shortened.
        """
        dt = self.nominal_dt(span)
        return max(1, math.ceil(span / dt - 0.5 * _CFL_SLACK))

    def solve(self) -> ValueFunction:
        """Integrate from ``t = 0`` back to the horizon."""
        cfg = self.cfg
        span = -cfg.horizon
        dt = self.nominal_dt(span)
        n_steps = self.step_count(span)
        stride = cfg.store_stride
        if stride == 0:
            stride = max(1, math.ceil(n_steps / (MAX_STORED_SLICES - 2)))
        self._log(
            logging.INFO,
            f"Solving {self.model.name!r} (gamma={cfg.gamma!r}, horizon={cfg.horizon!r}): "
            f"{n_steps} steps of {dt:.6g}, scheme {cfg.time_scheme}.",
        )
        started = time.perf_counter()
        values = np.array(self.l_field.values)
        times = [0.0]
        slices = [self.l_field]
        t = 0.0
        for step in range(1, n_steps + 1):
            t_next = cfg.horizon if step == n_steps else max(-step * dt, cfg.horizon)
            if not t_next < t:
                continue
            values = self.advance(values, t - t_next, cfg.gamma)
            self._check_finite(values, step)
            t = t_next
            if step % stride == 0 or step == n_steps:
                times.append(t)
                slices.append(ScalarField(self.grid, values))
        self._log(
            logging.INFO,
            f"Solved {self.model.name!r} (gamma={cfg.gamma!r}) in "
            f"{time.perf_counter() - started:.2f} s; kept {len(slices)} slices.",
        )
        return ValueFunction(
            self.grid,
            times,
            slices,
            cfg.gamma,
            self.model.name,
            request=solve_request(self.model, cfg),
        )

    def solve_stationary(self) -> ScalarField:
        """
        Iterate the undiscounted update until the sup-norm change per unit
        time falls to ``stationary_tol``.

        :raise NonConvergenceError: if ``max_steps`` is reached first.
        """
        cfg = self.cfg
        if cfg.gamma != 0:
            raise ValueError(
                f"The stationary solve requires gamma = 0 (got {cfg.gamma!r})."
            )
        dt = self.nominal_dt(1.0)
        values = np.array(self.l_field.values)
        residual = math.inf
        for step in range(1, cfg.max_steps + 1):
            updated = self.advance(values, dt, 0.0)
            self._check_finite(updated, step)
            residual = float(np.max(np.abs(updated - values))) / dt
            values = updated
            if residual <= cfg.stationary_tol:
                self.stationary_elapsed = step * dt
                self._log(
                    logging.INFO,
                    f"Stationary solve of {self.model.name!r} converged in {step} steps "
                    f"(residual {residual:.3g}).",
                )
                return ScalarField(self.grid, values)
            if step % STATIONARY_LOG_INTERVAL == 0:
                self._log(
                    logging.INFO, f"Stationary solve step {step}: residual {residual:.3g}."
                )
        err = NonConvergenceError(residual, cfg.max_steps)
        if self.logger is not None:
            self.logger.error(str(err))
        raise err


def step_backward(
    slice_: ScalarField,
    l_field: ScalarField,
    dt: float,
    cfg: SolveConfig,
    model: ControlAffineModel,
) -> ScalarField:
    """
    Advance ``slice_`` from time ``t`` to ``t - dt``.

    :raise CflViolationError: if ``dt`` exceeds the stable step.
    """
    if slice_.grid != l_field.grid:
        raise ValueError("Slice and safety target lie on different grids.")
    solver = CbvfSolver(model, l_field, cfg)
    values = solver.advance(np.array(slice_.values), dt, cfg.gamma)
    solver._check_finite(values, 1)
    return ScalarField(slice_.grid, values)


def solve_request(model: ControlAffineModel, cfg: SolveConfig) -> str:
    """
    Whitespace-free record of everything besides the grid, gamma, horizon
    and target that shapes a solve: the model's input boxes and
    parameters, and the numerical settings. E.g.::

        u=-1.0:1.0;d=-0.5:0.5;cfl=0.5;time_scheme=tvd_rk3;stationary_tol=1e-06;max_steps=100000
    """

    def bounds(box) -> str:
        # `+ 0.0` folds -0.0 onto 0.0.
        return ",".join(
            f"{lo + 0.0!r}:{hi + 0.0!r}" for lo, hi in zip(box.min.tolist(), box.max.tolist())
        )

    parts = [f"u={bounds(model.u_box)}", f"d={bounds(model.d_box)}"]
    parts += [f"{k}={float(v)!r}" for k, v in sorted(model.parameters.items())]
    parts += [
        f"cfl={float(cfg.cfl)!r}",
        f"time_scheme={cfg.time_scheme}",
        f"stationary_tol={float(cfg.stationary_tol)!r}",
        f"max_steps={int(cfg.max_steps)}",
    ]
    return ";".join(parts)


def solve_cbvf(
    model: ControlAffineModel,
    l_field: ScalarField,
    cfg: SolveConfig,
    logger: logging.Logger = None,
) -> ValueFunction:
    """
    Solve for the barrier-value function from ``t = 0`` back to
    ``cfg.horizon``. The final step is shortened to land on the horizon.

    :raise NumericalFailureError: if non-finite values appear.
    """
    return CbvfSolver(model, l_field, cfg, logger=logger).solve()


def solve_stationary(
    model: ControlAffineModel,
    l_field: ScalarField,
    cfg: SolveConfig,
    logger: logging.Logger = None,
) -> ScalarField:
    """
    Infinite-horizon (undiscounted) value, by iterating to a fixed point.

    :raise ValueError: if ``cfg.gamma`` is not 0.
    :raise NonConvergenceError: if ``cfg.max_steps`` is reached first.
    """
    if cfg.gamma != 0:
        raise ValueError(
            f"The stationary solve requires gamma = 0 (got {cfg.gamma!r})."
        )
    return CbvfSolver(model, l_field, cfg, logger=logger).solve_stationary()


__all__ = [
    "CflViolationError",
    "NumericalFailureError",
    "NonConvergenceError",
    "CbvfSolver",
    "step_backward",
    "solve_request",
    "solve_cbvf",
    "solve_stationary",
]
