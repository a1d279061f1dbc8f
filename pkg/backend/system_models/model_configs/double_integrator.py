"""Double integrator: position z, velocity v, ``z' = v + d``, ``v' = u``."""

import numpy as np

from ..box import Box
from ..control_affine_model import ControlAffineModel

U_BOUND = 0.5
D_BOUND = 0.2


def _p(x: np.ndarray) -> np.ndarray:
    return np.stack([x[..., 1], np.zeros_like(x[..., 1])], axis=-1)


def _q(x: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.array([[0.0], [1.0]]), x.shape[:-1] + (2, 1))


def _r(x: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.array([[1.0], [0.0]]), x.shape[:-1] + (2, 1))


def make_double_integrator() -> ControlAffineModel:
    return ControlAffineModel(
        name="double_integrator",
        n_x=2,
        p_eval=_p,
        q_eval=_q,
        r_eval=_r,
        u_box=Box([-U_BOUND], [U_BOUND]),
        d_box=Box([-D_BOUND], [D_BOUND]),
    )


__all__ = [
    "make_double_integrator",
]
