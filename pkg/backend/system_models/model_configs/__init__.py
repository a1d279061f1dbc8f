"""
Registry of the benchmark models, keyed by the name used in experiment
files.
"""

from .double_integrator import make_double_integrator
from .dubins_car import make_dubins_car
from .single_integrator_1d import make_single_integrator_1d

MODEL_FACTORIES = {
    "double_integrator": lambda params: make_double_integrator(),
    "dubins_car": lambda params: make_dubins_car(params.get("speed", 1.0)),
    "single_integrator_1d": lambda params: make_single_integrator_1d(
        params.get("u_max", 1.0), params.get("d_max", 0.0)
    ),
}


def make_model(name: str, **params):
    """
    Build the model registered under ``name``.

    :param name: One of the keys of ``MODEL_FACTORIES``.
    :param params: Model parameters (``speed``, ``u_max``, ``d_max``);
     parameters a model does not use are ignored.
    :raise KeyError: if no model is registered under ``name``.
    """
    try:
        factory = MODEL_FACTORIES[name]
    except KeyError:
        raise KeyError(f"Unknown model {name!r}.") from None
    return factory(params)


__all__ = [
    "MODEL_FACTORIES",
    "make_model",
    "make_double_integrator",
    "make_dubins_car",
    "make_single_integrator_1d",
]
