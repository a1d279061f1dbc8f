from .value_function_container import (
    MAGIC,
    ContainerFormatError,
    ContainerVersionError,
    ContainerTruncatedError,
    ContainerDimensionError,
    dump_value_function,
    load_value_function,
    export_value_function,
    import_value_function,
)
from .value_function_data_gateway import ValueFunctionDataGateway
from .file_value_function_data_gateway import FileValueFunctionDataGateway
from .csv_exports import (
    FLOAT_FORMAT,
    export_trajectory_csv,
    import_trajectory_csv,
    export_feasible_csv,
    export_level_sets_csv,
)
