from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np


class InputBoundsError(ValueError):
    """A control or disturbance lies outside its box."""


class Box:
    """
    An axis-aligned box ``[min[j], max[j]]`` per channel. A box may have
    zero channels (e.g., the disturbance set of a disturbance-free model).
    """

    def __init__(self, lower: Sequence[float], upper: Sequence[float]) -> None:
        lower = np.array(lower, dtype=float).reshape(-1)
        upper = np.array(upper, dtype=float).reshape(-1)
        if lower.shape != upper.shape:
            raise ValueError(
                f"Box bounds differ in length ({lower.size} vs. {upper.size})."
            )
        if np.any(lower > upper):
            j = int(np.argmax(lower > upper))
            raise ValueError(
                f"Box channel {j}: min ({lower[j]!r}) exceeds max ({upper[j]!r})."
            )
        lower.setflags(write=False)
        upper.setflags(write=False)
        self.min: np.ndarray = lower
        self.max: np.ndarray = upper

    @property
    def channels(self) -> int:
        return int(self.min.size)

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.min + self.max)

    @property
    def half_width(self) -> np.ndarray:
        return 0.5 * (self.max - self.min)

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.size != self.channels:
            return False
        return bool(np.all(v >= self.min) and np.all(v <= self.max))

    def clip(self, v) -> np.ndarray:
        """Project ``v`` onto the box."""
        return np.clip(np.asarray(v, dtype=float).reshape(-1), self.min, self.max)

    def vertices(self) -> list[np.ndarray]:
        """Every corner of the box (``2**channels`` of them)."""
        return [
            np.array(corner, dtype=float)
            for corner in itertools.product(*zip(self.min, self.max))
        ]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Box):
            return NotImplemented
        return np.array_equal(self.min, other.min) and np.array_equal(
            self.max, other.max
        )

    def __repr__(self):
        return f"Box(min={self.min.tolist()}, max={self.max.tolist()})"


__all__ = [
    "InputBoundsError",
    "Box",
]
