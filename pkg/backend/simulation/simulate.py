"""Closed-loop rollouts with zero-order-held inputs and RK4 integration."""

from __future__ import annotations

import logging
import math

import numpy as np

from backend.cbvf_solver import NumericalFailureError
from backend.safety_controllers import Policy
from backend.state_grid import Grid, OutOfDomainError, ScalarField, interpolate_value
from backend.system_models import ControlAffineModel

from .disturbance import DisturbanceStrategy
from .trajectory import Sample, Trajectory


def rk4_step(flow, x: np.ndarray, h: float) -> np.ndarray:
    """One classical Runge-Kutta step of ``x' = flow(x)``."""
    k1 = flow(x)
    k2 = flow(x + 0.5 * h * k1)
    k3 = flow(x + 0.5 * h * k2)
    k4 = flow(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate(
    model: ControlAffineModel,
    policy: Policy,
    dist: DisturbanceStrategy,
    x0,
    t0: float,
    dt_sim: float,
    barrier=None,
    l_field: ScalarField = None,
    grid: Grid = None,
    logger: logging.Logger = None,
) -> Trajectory:
    """
    Roll the closed loop forward from ``(x0, t0)`` to ``t = 0``. The
    control and disturbance are sampled at the start of each step and
    held over it. The rollout stops early, flagged as
    ``exited_domain``, if the state leaves the grid.

    :param barrier: Value function recorded as ``B`` at each sample
     (NaN when omitted). Its horizon bounds ``t0``.
    :param l_field: Safety target recorded as ``l`` (NaN when omitted).
    :param grid: Domain of the rollout; defaults to the grid of
     ``barrier`` or ``l_field``.
    :raise OutOfDomainError: if ``x0`` lies outside the grid.
    :raise NumericalFailureError: if the state becomes non-finite.
    """
    if not dt_sim > 0:
        raise ValueError(f"dt_sim must be positive (got {dt_sim!r}).")
    t0 = float(t0)
    if t0 > 0:
        raise ValueError(f"t0 must be <= 0 (got {t0!r}).")
    if barrier is not None and t0 < getattr(barrier, "horizon", -math.inf) - 1e-9:
        raise ValueError(
            f"t0 ({t0!r}) precedes the value function's horizon ({barrier.horizon!r})."
        )
    if grid is None:
        if barrier is not None:
            grid = barrier.grid
        elif l_field is not None:
            grid = l_field.grid
    x = np.array(x0, dtype=float).reshape(-1)
    if x.size != model.n_x:
        raise ValueError(f"x0 has {x.size} coordinates; {model.name!r} expects {model.n_x}.")
    periods = (None,) * model.n_x
    if grid is not None:
        if not grid.contains(x):
            raise OutOfDomainError(f"Start state {x.tolist()} lies outside the grid.")
        x = grid.wrap(x)
        periods = tuple(grid.period(i) for i in range(grid.ndim))

    n_steps = max(0, math.ceil(-t0 / dt_sim - 1e-9))
    samples = []
    exited = False
    t = t0
    for k in range(n_steps + 1):
        decision = policy.decide(x, t)
        d = dist(x, t)
        model.check_inputs(decision.control, d)
        b = barrier.value(x, t) if barrier is not None else math.nan
        l_value = interpolate_value(l_field, x) if l_field is not None else math.nan
        samples.append(
            Sample(
                t=t,
                x=x.copy(),
                u=decision.control,
                d=d,
                B=b,
                l=l_value,
                mode=decision.mode,
                feasible=decision.feasible,
                relaxed=decision.relaxed,
            )
        )
        if k == n_steps:
            break
        t_next = 0.0 if k + 1 == n_steps else t0 + (k + 1) * dt_sim
        u, h = decision.control, t_next - t
        x = rk4_step(lambda s: model.flow(s, u, d), x, h)
        if not np.all(np.isfinite(x)):
            msg = f"Non-finite state after simulation step {k + 1}."
            if logger is not None:
                logger.error(msg)
            raise NumericalFailureError(msg, step=k + 1)
        if grid is not None:
            if not grid.contains(x):
                exited = True
                if logger is not None:
                    logger.log(
                        logging.INFO,
                        f"Rollout left the grid at t={t_next!r} (state {x.tolist()}).",
                    )
                break
            x = grid.wrap(x)
        t = t_next
    return Trajectory(samples, dt_sim, exited_domain=exited, periods=periods)


__all__ = [
    "rk4_step",
    "simulate",
]
