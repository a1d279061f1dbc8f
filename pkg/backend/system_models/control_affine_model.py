"""
Control-affine dynamics ``x' = p(x) + q(x) u + r(x) d`` with box-bounded
control ``u`` and disturbance ``d``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .box import Box, InputBoundsError

# Each evaluator takes states shaped ``(..., n_x)`` and returns arrays
# shaped ``(..., n_x)`` (p), ``(..., n_x, n_u)`` (q) or ``(..., n_x, n_d)`` (r).
StateMap = Callable[[np.ndarray], np.ndarray]


class ControlAffineModel:
    """
    A named control-affine system. The evaluators are vectorized over
    leading axes so that the solver can evaluate every grid node at once.
    """

    def __init__(
        self,
        name: str,
        n_x: int,
        p_eval: StateMap,
        q_eval: StateMap,
        r_eval: StateMap,
        u_box: Box,
        d_box: Box,
        periodic_dims: tuple[int, ...] = (),
        parameters: dict[str, float] = None,
    ) -> None:
        if u_box.channels < 1:
            raise ValueError("A model needs at least one control channel.")
        self.name: str = name
        self.n_x: int = n_x
        self.n_u: int = u_box.channels
        self.n_d: int = d_box.channels
        self.p_eval: StateMap = p_eval
        self.q_eval: StateMap = q_eval
        self.r_eval: StateMap = r_eval
        self.u_box: Box = u_box
        self.d_box: Box = d_box
        # Dimensions that are angles; used as the default `grid_periodic`.
        self.periodic_dims: tuple[int, ...] = tuple(periodic_dims)
        # Constants baked into the evaluators (e.g., a fixed speed).
        self.parameters: dict[str, float] = dict(parameters or {})

    def _states(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n_x:
            raise ValueError(
                f"State has {x.shape[-1]} coordinates; {self.name!r} expects {self.n_x}."
            )
        return x

    def p(self, x) -> np.ndarray:
        return np.asarray(self.p_eval(self._states(x)), dtype=float)

    def q(self, x) -> np.ndarray:
        return np.asarray(self.q_eval(self._states(x)), dtype=float)

    def r(self, x) -> np.ndarray:
        return np.asarray(self.r_eval(self._states(x)), dtype=float)

    def flow(self, x, u, d) -> np.ndarray:
        """
        ``p(x) + q(x) u + r(x) d`` for a single state, without checking
        the input bounds.
        """
        x = self._states(x)
        u = np.asarray(u, dtype=float).reshape(-1)
        d = np.asarray(d, dtype=float).reshape(-1)
        return self.p(x) + self.q(x) @ u + self.r(x) @ d

    def check_inputs(self, u, d) -> None:
        """
        :raise InputBoundsError: if ``u`` or ``d`` lies outside its box.
        """
        if not self.u_box.contains(u):
            raise InputBoundsError(
                f"Control {np.asarray(u).tolist()} lies outside {self.u_box!r}."
            )
        if not self.d_box.contains(d):
            raise InputBoundsError(
                f"Disturbance {np.asarray(d).tolist()} lies outside {self.d_box!r}."
            )

    def __repr__(self):
        return (
            f"ControlAffineModel<{self.name}: n_x={self.n_x}, "
            f"n_u={self.n_u}, n_d={self.n_d}>"
        )


def eval_dynamics(model: ControlAffineModel, x, u, d=()) -> np.ndarray:
    """
    State velocity ``p(x) + q(x) u + r(x) d``.

    :raise InputBoundsError: if ``u`` or ``d`` lies outside its box.
    """
    model.check_inputs(u, d)
    return model.flow(x, u, d)


def bang_bang_inputs(
    model: ControlAffineModel, x, costate
) -> tuple[np.ndarray, np.ndarray]:
    """
    The maximin inputs for ``costate . f(x, u, d)``: each control channel
    at the bound favored by the sign of ``costate . q(x)``, each
    disturbance channel at the bound opposing ``costate . r(x)``. A zero
    coefficient selects the box midpoint.

    :return: A tuple ``(u_star, d_star)``.
    """
    costate = np.asarray(costate, dtype=float).reshape(-1)
    if costate.size != model.n_x:
        raise ValueError(
            f"Costate has {costate.size} entries; {model.name!r} expects {model.n_x}."
        )
    x = np.asarray(x, dtype=float).reshape(-1)
    c_u = costate @ model.q(x)
    c_d = costate @ model.r(x)
    u_box, d_box = model.u_box, model.d_box
    u_star = np.where(
        c_u > 0, u_box.max, np.where(c_u < 0, u_box.min, u_box.midpoint)
    )
    d_star = np.where(
        c_d > 0, d_box.min, np.where(c_d < 0, d_box.max, d_box.midpoint)
    )
    return u_star, d_star


__all__ = [
    "StateMap",
    "ControlAffineModel",
    "eval_dynamics",
    "bang_bang_inputs",
]
