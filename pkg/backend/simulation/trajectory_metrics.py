from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trajectory import Trajectory


@dataclass
class Metrics:
    """Safety and performance summary of one rollout."""

    min_l: float
    min_B: float
    target_reached: bool
    final_state: np.ndarray
    control_effort: float
    relaxation_count: int
    control_variation: float = 0.0
    switch_count: int = 0
    exited_domain: bool = False
    time_to_target: float = math.nan


def _distance(x: np.ndarray, center: np.ndarray, periods: tuple) -> float:
    diff = x[: center.size] - center
    for i in range(center.size):
        period = periods[i] if i < len(periods) else None
        if period:
            diff[i] = (diff[i] + 0.5 * period) % period - 0.5 * period
    return float(np.linalg.norm(diff))


def trajectory_metrics(
    traj: Trajectory, target_center, target_radius: float
) -> Metrics:
    """
    :param target_center: Goal point; may list only the leading state
     coordinates (e.g., position without heading).
    :param target_radius: The goal counts as reached when some sample lies
     within this distance of ``target_center``.
    :raise ValueError: if the trajectory is empty.
    """
    if not traj.samples:
        raise ValueError("Cannot compute metrics of an empty trajectory.")
    center = np.asarray(target_center, dtype=float).reshape(-1)
    times = traj.times
    controls = traj.controls.reshape(len(traj), -1)
    steps = np.diff(times)
    effort = float(np.sum(np.sum(controls[:-1] ** 2, axis=1) * steps))
    variation = float(np.sum(np.linalg.norm(np.diff(controls, axis=0), axis=1)))
    modes = [s.mode for s in traj.samples]
    switches = sum(1 for a, b in zip(modes, modes[1:]) if a != b)

    reached_at = math.nan
    for sample in traj.samples:
        if _distance(sample.x, center, traj.periods) <= target_radius:
            reached_at = sample.t
            break

    b_values = traj.barrier_values
    min_b = float(np.nanmin(b_values)) if np.any(~np.isnan(b_values)) else math.nan
    return Metrics(
        min_l=float(np.min(traj.target_values)),
        min_B=min_b,
        target_reached=not math.isnan(reached_at),
        final_state=traj.samples[-1].x.copy(),
        control_effort=effort,
        relaxation_count=traj.relaxation_count,
        control_variation=variation,
        switch_count=switches,
        exited_domain=traj.exited_domain,
        time_to_target=reached_at,
    )


__all__ = [
    "Metrics",
    "trajectory_metrics",
]
