from .grid import (
    MAX_DIMENSIONS,
    GridSpecError,
    OutOfDomainError,
    GridSpec,
    Grid,
    build_grid,
    ScalarField,
    one_sided_differences,
    upwind_derivatives,
    interpolate_array,
    interpolate_value,
    interpolate_values,
    gradient_at,
    slice_field,
)
