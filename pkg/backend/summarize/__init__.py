from .summarize import (
    METRIC_COLUMNS,
    summarize_value_function,
    format_summary,
    summarize_metrics,
    metrics_table,
)
