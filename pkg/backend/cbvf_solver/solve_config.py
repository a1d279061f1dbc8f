from __future__ import annotations

from dataclasses import dataclass

EULER = "euler"
TVD_RK3 = "tvd_rk3"
TIME_SCHEMES = (EULER, TVD_RK3)

# Automatic stride keeps at most this many slices.
MAX_STORED_SLICES = 512


@dataclass(frozen=True)
class SolveConfig:
    """
    Settings of one backward solve.

    ``store_stride`` of 0 picks a stride automatically so that no more
    than ``MAX_STORED_SLICES`` slices are retained.
    """

    gamma: float = 0.0
    horizon: float = -5.0
    cfl: float = 0.5
    time_scheme: str = TVD_RK3
    store_stride: int = 0
    stationary_tol: float = 1e-6
    max_steps: int = 100000

    def validate(self) -> None:
        """:raise ValueError: naming the first invalid field."""
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be >= 0 (got {self.gamma!r}).")
        if not self.horizon < 0:
            raise ValueError(f"horizon must be negative (got {self.horizon!r}).")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1] (got {self.cfl!r}).")
        if self.time_scheme not in TIME_SCHEMES:
            raise ValueError(
                f"time_scheme must be one of {TIME_SCHEMES} (got {self.time_scheme!r})."
            )
        if self.store_stride < 0:
            raise ValueError(f"store_stride must be >= 0 (got {self.store_stride!r}).")
        if not self.stationary_tol > 0:
            raise ValueError(
                f"stationary_tol must be positive (got {self.stationary_tol!r})."
            )
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be positive (got {self.max_steps!r}).")


__all__ = [
    "EULER",
    "TVD_RK3",
    "TIME_SCHEMES",
    "MAX_STORED_SLICES",
    "SolveConfig",
]
