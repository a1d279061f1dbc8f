from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd


@dataclass
class Sample:
    """One recorded instant of a closed-loop rollout."""

    t: float
    x: np.ndarray
    u: np.ndarray
    d: np.ndarray
    B: float
    l: float
    mode: str
    feasible: tuple[float, float] | None = None
    relaxed: bool = False


class Trajectory:
    """
    Samples of a rollout in time order. ``exited_domain`` marks a rollout
    stopped because the state left the grid. ``periods`` gives each state
    dimension's period (None if not periodic).
    """

    def __init__(
        self,
        samples: list[Sample],
        dt_sim: float,
        exited_domain: bool = False,
        periods: tuple = None,
    ) -> None:
        self.samples: list[Sample] = list(samples)
        self.dt_sim: float = float(dt_sim)
        self.exited_domain: bool = exited_domain
        if periods is None and self.samples:
            periods = (None,) * self.samples[0].x.size
        self.periods: tuple = tuple(periods) if periods is not None else ()

    def __len__(self):
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def states(self) -> np.ndarray:
        return np.array([s.x for s in self.samples])

    @property
    def controls(self) -> np.ndarray:
        return np.array([s.u for s in self.samples])

    @property
    def disturbances(self) -> np.ndarray:
        return np.array([s.d for s in self.samples])

    @property
    def barrier_values(self) -> np.ndarray:
        return np.array([s.B for s in self.samples])

    @property
    def target_values(self) -> np.ndarray:
        return np.array([s.l for s in self.samples])

    @property
    def relaxation_count(self) -> int:
        return sum(1 for s in self.samples if s.relaxed)

    def to_dataframe(self) -> pd.DataFrame:
        """
        Columns ``t, x_0.., u_0.., d_0.., B, l, mode`` (one row per
        sample).
        """
        if not self.samples:
            raise ValueError("Trajectory has no samples.")
        first = self.samples[0]
        data = {"t": self.times}
        for name, arr, width in (
            ("x", self.states, first.x.size),
            ("u", self.controls, first.u.size),
            ("d", self.disturbances, first.d.size),
        ):
            arr = np.asarray(arr, dtype=float).reshape(len(self.samples), width)
            for j in range(width):
                data[f"{name}_{j}"] = arr[:, j]
        data["B"] = self.barrier_values
        data["l"] = self.target_values
        data["mode"] = [s.mode for s in self.samples]
        return pd.DataFrame(data)

    @classmethod
    def from_dataframe(
        cls, df: pd.DataFrame, dt_sim: float = None, exited_domain: bool = False
    ) -> Trajectory:
        """Rebuild a trajectory from the columns written by ``to_dataframe``."""

        def block(prefix):
            cols = [c for c in df.columns if c.startswith(f"{prefix}_")]
            cols.sort(key=lambda c: int(c.split("_", 1)[1]))
            return df[cols].to_numpy(dtype=float).reshape(len(df), len(cols))

        xs, us, ds = block("x"), block("u"), block("d")
        times = df["t"].to_numpy(dtype=float)
        if dt_sim is None:
            dt_sim = float(times[1] - times[0]) if len(times) > 1 else 0.0
        samples = [
            Sample(
                t=float(times[k]),
                x=xs[k],
                u=us[k],
                d=ds[k],
                B=float(df["B"].iloc[k]),
                l=float(df["l"].iloc[k]),
                mode=str(df["mode"].iloc[k]),
            )
            for k in range(len(df))
        ]
        return cls(samples, dt_sim, exited_domain=exited_domain)

    def __repr__(self):
        return f"Trajectory<{len(self.samples)} samples, dt_sim={self.dt_sim!r}>"


__all__ = [
    "Sample",
    "Trajectory",
]
