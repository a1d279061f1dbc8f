import numpy as np

from ..box import Box
from ..control_affine_model import ControlAffineModel


def make_single_integrator_1d(u_max: float = 1.0, d_max: float = 0.0) -> ControlAffineModel:
    """
    ``x' = u + d`` with ``|u| <= u_max`` and ``|d| <= d_max``.
    """
    if u_max < 0 or d_max < 0:
        raise ValueError(
            f"Input bounds must be non-negative (got u_max={u_max!r}, d_max={d_max!r})."
        )

    def p(x: np.ndarray) -> np.ndarray:
        return np.zeros_like(x)

    def q(x: np.ndarray) -> np.ndarray:
        return np.ones(x.shape + (1,))

    return ControlAffineModel(
        name="single_integrator_1d",
        n_x=1,
        p_eval=p,
        q_eval=q,
        r_eval=q,
        u_box=Box([-u_max], [u_max]),
        d_box=Box([-d_max], [d_max]),
    )


__all__ = [
    "make_single_integrator_1d",
]
