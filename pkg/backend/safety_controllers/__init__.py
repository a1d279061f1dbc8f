from .min_norm_qp import (
    MAX_CHANNELS,
    FEASIBILITY_TOLERANCE,
    InfeasibleQPError,
    QPInstance,
    solve_min_norm_qp,
    kkt_residual,
    feasible_control_interval,
)
from .policy import (
    OPTIMAL,
    LEAST_RESTRICTIVE,
    CBVF_QP,
    CBF_QP,
    REFERENCE,
    POLICY_KINDS,
    Decision,
    Policy,
)
from .reference_policies import (
    PD_GAINS,
    HEADING_GAIN,
    pd_reference_policy,
    heading_reference_policy,
    zero_reference_policy,
)
from .safety_controllers import (
    RELAXATION_COUNTER,
    qp_constraint_terms,
    cbvf_qp_policy,
    cbf_qp_policy,
    optimal_safe_policy,
    least_restrictive_policy,
    default_epsilon,
)
