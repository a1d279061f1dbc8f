"""
Tabular artifacts written with pandas. Floats use 17 significant
digits, which reproduces every 64-bit value exactly on reparse.
"""

from __future__ import annotations

import os

import numpy as np
import pandas as pd

from backend.simulation import Trajectory

FLOAT_FORMAT = "%.17g"


def export_trajectory_csv(traj: Trajectory, path: str | os.PathLike) -> None:
    """Columns ``t, x_0.., u_0.., d_0.., B, l, mode``."""
    traj.to_dataframe().to_csv(path, index=False, float_format=FLOAT_FORMAT)


def import_trajectory_csv(path: str | os.PathLike, dt_sim: float = None) -> Trajectory:
    df = pd.read_csv(path, float_precision="round_trip", keep_default_na=True)
    return Trajectory.from_dataframe(df, dt_sim=dt_sim)


def export_feasible_csv(traj: Trajectory, path: str | os.PathLike) -> None:
    """
    Feasible control interval of the QP at each sample: columns
    ``t, u_lo, u_hi`` (empty when the QP had no feasible control or the
    policy is not a QP filter).
    """
    rows = []
    for sample in traj.samples:
        lo, hi = sample.feasible if sample.feasible is not None else (np.nan, np.nan)
        rows.append({"t": sample.t, "u_lo": lo, "u_hi": hi})
    pd.DataFrame(rows, columns=["t", "u_lo", "u_hi"]).to_csv(
        path, index=False, float_format=FLOAT_FORMAT
    )


def export_level_sets_csv(
    layers: dict[str, list], path: str | os.PathLike
) -> None:
    """
    Contour points of one or more named level sets: columns
    ``layer, polyline, x, y``, with ``polyline`` numbering the chains of
    each layer from 0.
    """
    frames = []
    for name, polylines in layers.items():
        for index, polyline in enumerate(polylines):
            points = np.asarray(getattr(polyline, "points", polyline), dtype=float)
            frames.append(
                pd.DataFrame(
                    {
                        "layer": name,
                        "polyline": index,
                        "x": points[:, 0],
                        "y": points[:, 1],
                    }
                )
            )
    if frames:
        df = pd.concat(frames, ignore_index=True)
    else:
        df = pd.DataFrame(columns=["layer", "polyline", "x", "y"])
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)


__all__ = [
    "FLOAT_FORMAT",
    "export_trajectory_csv",
    "import_trajectory_csv",
    "export_feasible_csv",
    "export_level_sets_csv",
]
