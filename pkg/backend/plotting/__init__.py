from .svg_plot import (
    STROKE_STYLES,
    AxisSpec,
    PolylineLayer,
    TrajectoryLayer,
    PointMarker,
    render_plot_svg,
)
