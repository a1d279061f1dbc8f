"""
Functions to summarize value functions and rollout metrics into dicts
and tables.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from backend.simulation import Metrics

METRIC_COLUMNS = [
    "min_l",
    "min_B",
    "target_reached",
    "time_to_target",
    "control_effort",
    "control_variation",
    "switch_count",
    "relaxation_count",
    "exited_domain",
    "final_state",
]


def summarize_value_function(vf) -> dict:
    """
    Summarize a value function as a dict with its model, gamma, solve
    settings, grid,
    stored time range, and the range and safe fraction of its final
    slice.

    :param vf: A ``ValueFunction``.
    :return: A summary dict as described above.
    """
    spec = vf.grid.spec
    final = vf.final_slice.values
    return {
        "Model": vf.model_name,
        "Gamma": vf.gamma,
        "Solve Settings": vf.request or "unknown",
        "Grid": [
            {
                "lo": spec.lo[i],
                "hi": spec.hi[i],
                "n": spec.n[i],
                "periodic": spec.periodic[i],
            }
            for i in range(spec.ndim)
        ],
        "Time Range": [float(vf.times[-1]), float(vf.times[0])],
        "Slice Count": len(vf.slices),
        "Final Slice Min": float(final.min()),
        "Final Slice Max": float(final.max()),
        "Safe Fraction": float(np.mean(final >= 0)),
    }


def format_summary(summary: dict) -> str:
    """One ``key: value`` line per entry of a summary dict."""
    lines = []
    for key, value in summary.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}:")
            for i, entry in enumerate(value):
                inner = ", ".join(f"{k}={v!r}" for k, v in entry.items())
                lines.append(f"  [{i}] {inner}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def summarize_metrics(metrics: Metrics) -> dict:
    """
    Summarize the metrics of one rollout as a flat dict (the final state
    is written as a space-separated string).
    """
    return {
        "min_l": metrics.min_l,
        "min_B": metrics.min_B,
        "target_reached": bool(metrics.target_reached),
        "time_to_target": metrics.time_to_target,
        "control_effort": metrics.control_effort,
        "control_variation": metrics.control_variation,
        "switch_count": int(metrics.switch_count),
        "relaxation_count": int(metrics.relaxation_count),
        "exited_domain": bool(metrics.exited_domain),
        "final_state": " ".join(repr(float(v)) for v in metrics.final_state),
    }


def metrics_table(rows: list[dict]) -> pd.DataFrame:
    """
    Tabulate summary rows (each a ``summarize_metrics`` dict, optionally
    with identifying columns such as ``run``, ``gamma`` or
    ``controller``), identifying columns first.
    """
    df = pd.DataFrame(rows)
    if df.empty:
        return pd.DataFrame(columns=METRIC_COLUMNS)
    leading = [c for c in df.columns if c not in METRIC_COLUMNS]
    trailing = [c for c in METRIC_COLUMNS if c in df.columns]
    return df[leading + trailing]


__all__ = [
    "METRIC_COLUMNS",
    "summarize_value_function",
    "format_summary",
    "summarize_metrics",
    "metrics_table",
]
