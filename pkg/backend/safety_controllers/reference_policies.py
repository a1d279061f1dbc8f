"""Nominal (safety-unaware) controllers that the safety filters act on."""

from __future__ import annotations

import numpy as np

from backend.system_models import ControlAffineModel

from .policy import Policy, REFERENCE

PD_GAINS = (1.0, 1.5)
HEADING_GAIN = 3.0


def pd_reference_policy(
    model: ControlAffineModel, goal, gains=PD_GAINS
) -> Policy:
    """
    ``u = -k_p (z - z_goal) - k_d v`` for a position/velocity model,
    clipped to the control box.

    :param goal: Goal position ``z_goal`` (only the first coordinate is
     used).
    :param gains: ``(k_p, k_d)``.
    """
    if model.n_x != 2 or model.n_u != 1:
        raise ValueError(f"PD reference needs a 2-state, 1-input model, not {model!r}.")
    kp, kd = float(gains[0]), float(gains[1])
    z_goal = float(np.asarray(goal, dtype=float).reshape(-1)[0])

    def control(x, t):
        return np.array([-kp * (x[0] - z_goal) - kd * x[1]])

    return Policy.from_function(control, REFERENCE, model.u_box)


def heading_reference_policy(
    model: ControlAffineModel, goal, gain: float = HEADING_GAIN
) -> Policy:
    """
    Turn toward ``goal``: ``u = k * wrap(atan2(goal - position) - theta)``,
    with the heading error wrapped into ``[-pi, pi)``.
    """
    if model.n_x != 3 or model.n_u != 1:
        raise ValueError(f"Heading reference needs a 3-state, 1-input model, not {model!r}.")
    goal = np.asarray(goal, dtype=float).reshape(-1)[:2]
    gain = float(gain)

    def control(x, t):
        bearing = np.arctan2(goal[1] - x[1], goal[0] - x[0])
        error = np.mod(bearing - x[2] + np.pi, 2 * np.pi) - np.pi
        return np.array([gain * error])

    return Policy.from_function(control, REFERENCE, model.u_box)


def zero_reference_policy(model: ControlAffineModel) -> Policy:
    """The box midpoint, always."""
    midpoint = model.u_box.midpoint

    def control(x, t):
        return midpoint

    return Policy.from_function(control, REFERENCE, model.u_box)


__all__ = [
    "PD_GAINS",
    "HEADING_GAIN",
    "pd_reference_policy",
    "heading_reference_policy",
    "zero_reference_policy",
]
