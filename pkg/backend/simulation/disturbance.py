from __future__ import annotations

from typing import Callable

import numpy as np

from backend.system_models import ControlAffineModel, bang_bang_inputs

ZERO = "zero"
CONSTANT = "constant"
WORST_CASE = "worst_case"
DISTURBANCE_KINDS = (ZERO, CONSTANT, WORST_CASE)


class DisturbanceStrategy:
    """A state-time feedback map for the disturbance input."""

    def __init__(self, kind: str, evaluator: Callable[[np.ndarray, float], np.ndarray]) -> None:
        if kind not in DISTURBANCE_KINDS:
            raise ValueError(f"Unknown disturbance kind {kind!r}.")
        self.kind: str = kind
        self.evaluator = evaluator

    def __call__(self, x, t: float) -> np.ndarray:
        return np.asarray(self.evaluator(x, t), dtype=float).reshape(-1)

    def __repr__(self):
        return f"DisturbanceStrategy<{self.kind}>"


def zero_disturbance(model: ControlAffineModel) -> DisturbanceStrategy:
    """No disturbance (the midpoint of a symmetric box is zero)."""
    d = np.zeros(model.n_d)
    if not model.d_box.contains(d):
        raise ValueError(f"Zero disturbance lies outside {model.d_box!r}.")
    return DisturbanceStrategy(ZERO, lambda x, t: d)


def constant_disturbance(model: ControlAffineModel, vector) -> DisturbanceStrategy:
    d = np.array(vector, dtype=float).reshape(-1)
    if not model.d_box.contains(d):
        raise ValueError(f"Disturbance {d.tolist()} lies outside {model.d_box!r}.")
    return DisturbanceStrategy(CONSTANT, lambda x, t: d)


def worst_case_disturbance(vf, model: ControlAffineModel) -> DisturbanceStrategy:
    """
    The disturbance minimizing the barrier's rate of change: each channel
    at the bound opposing ``g . r(x)``, the midpoint on ties, where ``g``
    is the barrier's interpolated gradient at ``(x, t)``.
    """
    if model.n_d == 0:
        raise ValueError(f"{model.name!r} has no disturbance input.")

    def evaluator(x, t):
        _, d_star = bang_bang_inputs(model, x, vf.gradient(x, t))
        return d_star

    return DisturbanceStrategy(WORST_CASE, evaluator)


def make_disturbance(
    kind: str, model: ControlAffineModel, vf=None, vector=None
) -> DisturbanceStrategy:
    """Build a strategy by kind name."""
    if kind == ZERO:
        return zero_disturbance(model)
    if kind == CONSTANT:
        if vector is None:
            vector = np.zeros(model.n_d)
        return constant_disturbance(model, vector)
    if kind == WORST_CASE:
        if vf is None:
            raise ValueError("A worst-case disturbance needs a value function.")
        return worst_case_disturbance(vf, model)
    raise ValueError(f"Unknown disturbance kind {kind!r}.")


__all__ = [
    "ZERO",
    "CONSTANT",
    "WORST_CASE",
    "DISTURBANCE_KINDS",
    "DisturbanceStrategy",
    "zero_disturbance",
    "constant_disturbance",
    "worst_case_disturbance",
    "make_disturbance",
]
