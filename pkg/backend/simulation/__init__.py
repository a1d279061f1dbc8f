from .disturbance import (
    ZERO,
    CONSTANT,
    WORST_CASE,
    DISTURBANCE_KINDS,
    DisturbanceStrategy,
    zero_disturbance,
    constant_disturbance,
    worst_case_disturbance,
    make_disturbance,
)
from .trajectory import Sample, Trajectory
from .simulate import rk4_step, simulate
from .trajectory_metrics import Metrics, trajectory_metrics
