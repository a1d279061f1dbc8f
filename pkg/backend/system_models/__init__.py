from .box import InputBoundsError, Box
from .control_affine_model import (
    StateMap,
    ControlAffineModel,
    eval_dynamics,
    bang_bang_inputs,
)
from .model_configs import (
    MODEL_FACTORIES,
    make_model,
    make_double_integrator,
    make_dubins_car,
    make_single_integrator_1d,
)
