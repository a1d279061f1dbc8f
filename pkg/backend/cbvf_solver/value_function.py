"""
Solved barrier-value functions, queried at arbitrary ``(x, t)``.

Both ``ValueFunction`` (time-indexed slices) and ``StationaryValueFunction``
(a single time-invariant slice) expose ``value``, ``gradient`` and
``time_derivative``, so the controllers can use either as a barrier.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from backend.state_grid import (
    Grid,
    ScalarField,
    interpolate_value,
    interpolate_values,
    gradient_at,
)

# Times within this distance of the stored range are accepted and
# clamped onto it.
_TIME_TOLERANCE = 1e-9


class ValueFunction:
    """
    Slices of the barrier-value function stored at strictly decreasing
    times, from ``times[0] = 0`` back to ``times[-1] = horizon``.
    """

    def __init__(
        self,
        grid: Grid,
        times: Sequence[float],
        slices: Sequence[ScalarField],
        gamma: float,
        model_name: str,
        request: str = None,
    ) -> None:
        times = np.array(times, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise ValueError("A value function needs at least one stored time.")
        if len(slices) != times.size:
            raise ValueError(
                f"Got {len(slices)} slices for {times.size} stored times."
            )
        if times[0] != 0.0:
            raise ValueError(f"Stored times must start at 0 (got {times[0]!r}).")
        if np.any(np.diff(times) >= 0):
            raise ValueError("Stored times must be strictly decreasing.")
        for k, field in enumerate(slices):
            if field.grid != grid:
                raise ValueError(f"Slice {k} lies on a different grid.")
        times.setflags(write=False)
        self.grid: Grid = grid
        self.times: np.ndarray = times
        self.slices: tuple[ScalarField, ...] = tuple(slices)
        self.gamma: float = float(gamma)
        self.model_name: str = model_name
        # See `solve_request`; None when unknown.
        self.request: str = request

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def final_slice(self) -> ScalarField:
        """The slice at the horizon (the longest-horizon value)."""
        return self.slices[-1]

    def bracket(self, t: float) -> tuple[int, int, float]:
        """
        INTERNAL USE:

        Stored indices ``(k, k + 1)`` whose times bracket ``t`` and the
        weight of slice ``k + 1``.

        :raise ValueError: if ``t`` lies outside ``[horizon, 0]``.
        """
        t = float(t)
        if t > _TIME_TOLERANCE or t < self.horizon - _TIME_TOLERANCE:
            raise ValueError(
                f"Time {t!r} lies outside the solved range [{self.horizon!r}, 0]."
            )
        if self.times.size == 1:
            return 0, 0, 0.0
        t = min(0.0, max(self.horizon, t))
        # `times` is decreasing; find k with times[k] >= t >= times[k + 1].
        k = int(np.searchsorted(-self.times, -t, side="right")) - 1
        k = min(max(k, 0), self.times.size - 2)
        t_k, t_next = self.times[k], self.times[k + 1]
        weight = (t_k - t) / (t_k - t_next)
        return k, k + 1, float(min(1.0, max(0.0, weight)))

    def slice_at(self, t: float) -> ScalarField:
        """The field at time ``t``, linear in time between stored slices."""
        k0, k1, w = self.bracket(t)
        if w == 0.0:
            return self.slices[k0]
        if w == 1.0:
            return self.slices[k1]
        values = (1.0 - w) * self.slices[k0].values + w * self.slices[k1].values
        return ScalarField(self.grid, values)

    def value(self, x, t: float) -> float:
        k0, k1, w = self.bracket(t)
        v0 = interpolate_value(self.slices[k0], x)
        if w == 0.0:
            return v0
        return (1.0 - w) * v0 + w * interpolate_value(self.slices[k1], x)

    def values_at(self, points, t: float) -> np.ndarray:
        """Vectorized ``value`` over the rows of ``points``."""
        k0, k1, w = self.bracket(t)
        v0 = interpolate_values(self.slices[k0], points)
        if w == 0.0:
            return v0
        v1 = interpolate_values(self.slices[k1], points)
        return (1.0 - w) * v0 + w * v1

    def gradient(self, x, t: float) -> np.ndarray:
        k0, k1, w = self.bracket(t)
        g0 = gradient_at(self.slices[k0], x)
        if w == 0.0:
            return g0
        return (1.0 - w) * g0 + w * gradient_at(self.slices[k1], x)

    def time_derivative(self, x, t: float) -> float:
        """
        Difference quotient of the interpolated values across the two
        stored slices bracketing ``t``.
        """
        k0, k1, _ = self.bracket(t)
        if k0 == k1:
            return 0.0
        v0 = interpolate_value(self.slices[k0], x)
        v1 = interpolate_value(self.slices[k1], x)
        return (v0 - v1) / (self.times[k0] - self.times[k1])

    def __repr__(self):
        return (
            f"ValueFunction<{self.model_name}, gamma={self.gamma!r}, "
            f"{len(self.slices)} slices over [{self.horizon!r}, 0]>"
        )


class StationaryValueFunction:
    """
    A time-invariant barrier (e.g., the infinite-horizon value) with the
    same query interface as ``ValueFunction``.
    """

    def __init__(self, field: ScalarField, model_name: str = None) -> None:
        self.field: ScalarField = field
        self.grid: Grid = field.grid
        self.model_name: str = model_name
        self.gamma: float = 0.0
        self.horizon: float = -np.inf

    @property
    def final_slice(self) -> ScalarField:
        return self.field

    def slice_at(self, t: float) -> ScalarField:
        return self.field

    def value(self, x, t: float = 0.0) -> float:
        return interpolate_value(self.field, x)

    def values_at(self, points, t: float = 0.0) -> np.ndarray:
        return interpolate_values(self.field, points)

    def gradient(self, x, t: float = 0.0) -> np.ndarray:
        return gradient_at(self.field, x)

    def time_derivative(self, x, t: float = 0.0) -> float:
        return 0.0

    def __repr__(self):
        return f"StationaryValueFunction<{self.model_name}>"


__all__ = [
    "ValueFunction",
    "StationaryValueFunction",
]
