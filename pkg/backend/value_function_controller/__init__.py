from .value_function_controller import (
    CACHE_HITS,
    SOLVES,
    run_id_for,
    stationary_run_id_for,
    ValueFunctionController,
)
