"""
Static SVG plots of 2D level sets, trajectories and markers.

Every numeric attribute is formatted in Python before rendering, so the
same layers always produce the same document text.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from jinja2 import Environment, PackageLoader, StrictUndefined

# (stroke color, dash pattern), cycled over the line layers.
STROKE_STYLES = (
    ("#2a9d3f", ""),
    ("#e07b00", ""),
    ("#1f5fbf", ""),
    ("#b8233a", "6 3"),
    ("#6a3d9a", "2 2"),
    ("#17becf", "8 3 2 3"),
    ("#555555", "4 4"),
)
MARKER_COLORS = ("#d62728", "#111111", "#ff7f0e", "#2ca02c")

_ENV = Environment(
    loader=PackageLoader("backend.plotting", "templates"),
    autoescape=True,
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)

_MARGIN_LEFT = 64
_MARGIN_RIGHT = 150
_MARGIN_TOP = 28
_MARGIN_BOTTOM = 44
_TICKS = 5


@dataclass
class AxisSpec:
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    x_label: str = "x_0"
    y_label: str = "x_1"
    title: str = ""


@dataclass
class PolylineLayer:
    """A named set of polylines (e.g., every contour of one level set)."""

    name: str
    polylines: list = field(default_factory=list)


@dataclass
class TrajectoryLayer:
    name: str
    points: np.ndarray = None


@dataclass
class PointMarker:
    name: str
    point: tuple[float, float] = (0.0, 0.0)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _points_of(polyline) -> np.ndarray:
    points = getattr(polyline, "points", polyline)
    return np.asarray(points, dtype=float).reshape(-1, 2)


def _data_bounds(layers) -> tuple[tuple[float, float], tuple[float, float]]:
    chunks = []
    for layer in layers:
        if isinstance(layer, PolylineLayer):
            chunks.extend(_points_of(p) for p in layer.polylines)
        elif isinstance(layer, TrajectoryLayer):
            chunks.append(_points_of(layer.points))
        elif isinstance(layer, PointMarker):
            chunks.append(_points_of(layer.point))
    chunks = [c for c in chunks if len(c)]
    if not chunks:
        return (0.0, 1.0), (0.0, 1.0)
    allpts = np.vstack(chunks)
    bounds = []
    for dim in range(2):
        lo, hi = float(allpts[:, dim].min()), float(allpts[:, dim].max())
        pad = 0.05 * (hi - lo) if hi > lo else 1.0
        bounds.append((lo - pad, hi + pad))
    return bounds[0], bounds[1]


def render_plot_svg(layers: list, width: int = 640, height: int = 440) -> str:
    """
    Render ``layers`` (``PolylineLayer``, ``TrajectoryLayer``,
    ``PointMarker`` and at most one ``AxisSpec``) as a standalone SVG
    document. Each line layer becomes a single ``<path>``; the legend
    lists every named layer. Without an ``AxisSpec`` the axes span the
    data.

    :raise ValueError: if ``layers`` is empty or the axis ranges are
     inconsistent.
    """
    if not layers:
        raise ValueError("Nothing to plot: the layer list is empty.")
    axes = [layer for layer in layers if isinstance(layer, AxisSpec)]
    if len(axes) > 1:
        raise ValueError("At most one axis spec may be given.")
    drawable = [layer for layer in layers if not isinstance(layer, AxisSpec)]
    for layer in drawable:
        if not isinstance(layer, (PolylineLayer, TrajectoryLayer, PointMarker)):
            raise TypeError(f"Cannot plot a {type(layer).__name__}.")
    if axes:
        axis = axes[0]
    else:
        x_range, y_range = _data_bounds(drawable)
        axis = AxisSpec(x_range, y_range)
    (x_lo, x_hi), (y_lo, y_hi) = axis.x_range, axis.y_range
    if not (np.isfinite([x_lo, x_hi, y_lo, y_hi]).all() and x_lo < x_hi and y_lo < y_hi):
        raise ValueError(f"Inconsistent axis ranges {axis.x_range}, {axis.y_range}.")

    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM

    def px(x):
        return _MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return _MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    def path_data(chains) -> str:
        parts = []
        for pts in chains:
            if len(pts) == 0:
                continue
            coords = [f"{_fmt(px(x))} {_fmt(py(y))}" for x, y in pts]
            parts.append("M " + " L ".join(coords))
        return " ".join(parts)

    rendered, legend = [], []
    line_index = marker_index = 0
    for layer in drawable:
        if isinstance(layer, PointMarker):
            color = MARKER_COLORS[marker_index % len(MARKER_COLORS)]
            marker_index += 1
            x, y = _points_of(layer.point)[0]
            rendered.append(
                {"kind": "marker", "name": layer.name, "cx": _fmt(px(x)), "cy": _fmt(py(y)), "color": color}
            )
            legend.append({"name": layer.name, "color": color, "dash": "", "stroke_width": "6"})
            continue
        color, dash = STROKE_STYLES[line_index % len(STROKE_STYLES)]
        line_index += 1
        if isinstance(layer, TrajectoryLayer):
            chains = [_points_of(layer.points)]
            stroke_width = "2.2"
        else:
            chains = [_points_of(p) for p in layer.polylines]
            stroke_width = "1.5"
        rendered.append(
            {
                "kind": "line",
                "name": layer.name,
                "d": path_data(chains),
                "color": color,
                "dash": dash,
                "stroke_width": stroke_width,
            }
        )
        legend.append({"name": layer.name, "color": color, "dash": dash, "stroke_width": stroke_width})

    legend_x = _MARGIN_LEFT + plot_w + 12
    for k, entry in enumerate(legend):
        y = _MARGIN_TOP + 10 + 18 * k
        entry.update(
            x=_fmt(legend_x), x_end=_fmt(legend_x + 24), label_x=_fmt(legend_x + 30), y=_fmt(y)
        )

    bottom = _MARGIN_TOP + plot_h
    x_ticks = [
        {
            "position": _fmt(px(v)),
            "end": _fmt(bottom + 5),
            "label_at": _fmt(bottom + 17),
            "label": f"{v:.3g}",
        }
        for v in np.linspace(x_lo, x_hi, _TICKS)
    ]
    y_ticks = [
        {
            "position": _fmt(py(v)),
            "end": _fmt(_MARGIN_LEFT - 5),
            "label_at": _fmt(_MARGIN_LEFT - 7),
            "label": f"{v:.3g}",
        }
        for v in np.linspace(y_lo, y_hi, _TICKS)
    ]
    box = {
        "left": _fmt(_MARGIN_LEFT),
        "top": _fmt(_MARGIN_TOP),
        "width": _fmt(plot_w),
        "height": _fmt(plot_h),
        "bottom": _fmt(bottom),
        "center_x": _fmt(_MARGIN_LEFT + plot_w / 2),
        "center_y": _fmt(_MARGIN_TOP + plot_h / 2),
    }
    template = _ENV.get_template("plot.svg.j2")
    return template.render(
        width=width,
        height=height,
        title=axis.title,
        x_label=axis.x_label,
        y_label=axis.y_label,
        box=box,
        x_ticks=x_ticks,
        y_ticks=y_ticks,
        layers=rendered,
        legend=legend,
    )


__all__ = [
    "STROKE_STYLES",
    "AxisSpec",
    "PolylineLayer",
    "TrajectoryLayer",
    "PointMarker",
    "render_plot_svg",
]
