from .target_shapes import (
    BOX,
    BOX_COMPLEMENT,
    CIRCLE_COMPLEMENT,
    MIN_OF,
    MAX_OF,
    ShapeSyntaxError,
    ShapeSpec,
    parse_shape,
    format_shape,
    build_target_field,
)
from .experiment import (
    DEFAULT_SCENE_NOTE,
    DEFAULT_SCENES,
    Scene,
    Experiment,
)
from .config_parser import (
    REQUIRED_KEYS,
    ConfigError,
    split_top_level,
    parse_experiment_config,
    format_experiment_config,
)
from .experiment_controller import (
    EXIT_OK,
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_IO,
    SUMMARY_FILE,
    exit_code_for,
    RunResult,
    ExperimentController,
    run_experiment,
)
