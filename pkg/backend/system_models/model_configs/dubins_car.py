"""
Dubins car with fixed forward speed: state ``(x, y, theta)``, control
is the turn rate. No disturbance.
"""

import numpy as np

from ..box import Box
from ..control_affine_model import ControlAffineModel

TURN_RATE_BOUND = 3.0
HEADING_DIM = 2


def make_dubins_car(speed: float = 1.0) -> ControlAffineModel:
    """
    :param speed: Forward speed; must be positive.
    """
    if not speed > 0:
        raise ValueError(f"Dubins car speed must be positive (got {speed!r}).")
    speed = float(speed)

    def p(x: np.ndarray) -> np.ndarray:
        theta = x[..., HEADING_DIM]
        return np.stack(
            [speed * np.cos(theta), speed * np.sin(theta), np.zeros_like(theta)],
            axis=-1,
        )

    def q(x: np.ndarray) -> np.ndarray:
        return np.broadcast_to(np.array([[0.0], [0.0], [1.0]]), x.shape[:-1] + (3, 1))

    def r(x: np.ndarray) -> np.ndarray:
        return np.zeros(x.shape[:-1] + (3, 0))

    return ControlAffineModel(
        name="dubins_car",
        n_x=3,
        p_eval=p,
        q_eval=q,
        r_eval=r,
        u_box=Box([-TURN_RATE_BOUND], [TURN_RATE_BOUND]),
        d_box=Box([], []),
        periodic_dims=(HEADING_DIM,),
        parameters={"speed": speed},
    )


__all__ = [
    "make_dubins_car",
]
