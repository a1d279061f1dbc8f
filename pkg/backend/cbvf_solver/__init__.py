from .hamiltonian import (
    hamiltonian,
    dissipation_bounds,
    numerical_hamiltonian,
)
from .solve_config import (
    EULER,
    TVD_RK3,
    TIME_SCHEMES,
    MAX_STORED_SLICES,
    SolveConfig,
)
from .value_function import ValueFunction, StationaryValueFunction
from .cbvf_solver import (
    CflViolationError,
    NumericalFailureError,
    NonConvergenceError,
    CbvfSolver,
    step_backward,
    solve_request,
    solve_cbvf,
    solve_stationary,
)
