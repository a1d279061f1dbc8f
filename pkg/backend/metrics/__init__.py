
from .metrics_controller import MetricsController
