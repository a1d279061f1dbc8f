"""
Line-oriented experiment files::

    # Double integrator, three discount rates.
    model = double_integrator
    gamma = 0, 0.2, 0.5
    x0 = [3, -1], [4, 1.5]

One ``key = value`` per line; ``#`` starts a comment. Lists are
comma-separated at the top level and vectors are bracketed.
"""

from __future__ import annotations

import re
from typing import Callable

import numpy as np

from backend.cbvf_solver import TIME_SCHEMES
from backend.safety_controllers import POLICY_KINDS
from backend.simulation import DISTURBANCE_KINDS, WORST_CASE
from backend.state_grid import GridSpecError
from backend.system_models import MODEL_FACTORIES, make_model

from .experiment import Experiment, DEFAULT_GAINS
from .target_shapes import ShapeSyntaxError, parse_shape, format_shape, max_dimension

REQUIRED_KEYS = ("model",)
REFERENCE_KINDS = tuple(DEFAULT_GAINS)
# Models each reference controller applies to.
REFERENCE_MODELS = {"pd": ("double_integrator",), "heading": ("dubins_car",)}

_IDENTIFIER = re.compile(r"^[A-Za-z0-9_.\-]+$")


class ConfigError(ValueError):
    """An experiment file is malformed or inconsistent."""

    def __init__(self, message: str, line: int = None, key: str = None) -> None:
        location = []
        if line is not None:
            location.append(f"line {line}")
        if key is not None:
            location.append(f"key {key!r}")
        if location:
            message = f"{', '.join(location)}: {message}"
        super().__init__(message)
        self.line = line
        self.key = key


def split_top_level(text: str) -> list[str]:
    """Split on commas that are not inside brackets or parentheses."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ValueError(f"Unbalanced brackets in {text!r}.")
        if ch == "," and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    if depth != 0:
        raise ValueError(f"Unbalanced brackets in {text!r}.")
    parts.append("".join(current).strip())
    if any(not p for p in parts):
        raise ValueError(f"Empty list entry in {text!r}.")
    return parts


def _real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"expected a number, got {text!r}") from None
    if not np.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"expected an integer, got {text!r}") from None


def _bool(text: str) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _vector_of(item: Callable) -> Callable:
    def parse(text: str) -> tuple:
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise ValueError(f"expected a bracketed vector, got {text!r}")
        inner = text[1:-1].strip()
        if not inner:
            return ()
        return tuple(item(v.strip()) for v in inner.split(","))

    return parse


def _list_of(item: Callable) -> Callable:
    def parse(text: str) -> tuple:
        return tuple(item(v) for v in split_top_level(text))

    return parse


def _checked(parse: Callable, check: Callable, requirement: str) -> Callable:
    def wrapped(text: str):
        value = parse(text)
        if not check(value):
            raise ValueError(f"must be {requirement} (got {text!r})")
        return value

    return wrapped


def _choice(choices) -> Callable:
    def parse(text: str) -> str:
        if text not in choices:
            raise ValueError(f"{text!r} is not one of {', '.join(choices)}")
        return text

    return parse


def _identifier(text: str) -> str:
    if not _IDENTIFIER.match(text):
        raise ValueError(f"{text!r} is not a valid identifier")
    return text


def _text(text: str) -> str:
    if not text:
        raise ValueError("value is empty")
    return text


def _auto_or(parse: Callable) -> Callable:
    def wrapped(text: str):
        return None if text == "auto" else parse(text)

    return wrapped


def _plot_slice(text: str) -> tuple[int, float]:
    dim, sep, value = text.partition("=")
    if not sep:
        raise ValueError(f"expected dim=value, got {text!r}")
    return _int(dim.strip()), _real(value.strip())


def _shape(text: str):
    try:
        return parse_shape(text)
    except ShapeSyntaxError as e:
        raise ValueError(str(e)) from None


_vector = _vector_of(_real)


def _fmt_real(value) -> str:
    return repr(float(value))


def _fmt_vector(values) -> str:
    return "[" + ", ".join(_fmt_real(v) for v in values) + "]"


def _fmt_int_vector(values) -> str:
    return "[" + ", ".join(str(int(v)) for v in values) + "]"


def _fmt_bool_vector(values) -> str:
    return "[" + ", ".join("true" if v else "false" for v in values) + "]"


# key: (parser, formatter). Order is the canonical order of formatted files.
KEYS = {
    "model": (_choice(tuple(MODEL_FACTORIES)), str),
    "speed": (_checked(_real, lambda v: v > 0, "positive"), _fmt_real),
    "u_max": (_checked(_real, lambda v: v >= 0, ">= 0"), _fmt_real),
    "d_max": (_checked(_real, lambda v: v >= 0, ">= 0"), _fmt_real),
    "label": (_identifier, str),
    "scene_note": (_text, str),
    "grid_lo": (_vector, _fmt_vector),
    "grid_hi": (_vector, _fmt_vector),
    "grid_n": (_vector_of(_int), _fmt_int_vector),
    "grid_periodic": (_vector_of(_bool), _fmt_bool_vector),
    "target": (_shape, format_shape),
    "gamma": (
        _list_of(_checked(_real, lambda v: v >= 0, ">= 0")),
        lambda v: ", ".join(_fmt_real(g) for g in v),
    ),
    "horizon": (_checked(_real, lambda v: v < 0, "negative"), _fmt_real),
    "cfl": (_checked(_real, lambda v: 0 < v <= 1, "in (0, 1]"), _fmt_real),
    "time_scheme": (_choice(TIME_SCHEMES), str),
    "store_stride": (_checked(_int, lambda v: v >= 0, ">= 0"), str),
    "stationary_tol": (_checked(_real, lambda v: v > 0, "positive"), _fmt_real),
    "max_steps": (_checked(_int, lambda v: v > 0, "positive"), str),
    "controllers": (_list_of(_choice(POLICY_KINDS)), ", ".join),
    "reference": (_choice(REFERENCE_KINDS), str),
    "reference_gains": (_vector, _fmt_vector),
    "epsilon": (
        _auto_or(_checked(_real, lambda v: v >= 0, ">= 0 or auto")),
        _fmt_real,
    ),
    "goal": (_vector, _fmt_vector),
    "goal_radius": (_checked(_real, lambda v: v > 0, "positive"), _fmt_real),
    "x0": (_list_of(_vector), lambda v: ", ".join(_fmt_vector(x) for x in v)),
    "random_starts": (_checked(_int, lambda v: v >= 0, ">= 0"), str),
    "t0": (_checked(_real, lambda v: v <= 0, "<= 0"), _fmt_real),
    "dt_sim": (
        _auto_or(_checked(_real, lambda v: v > 0, "positive or auto")),
        _fmt_real,
    ),
    "disturbance": (_list_of(_choice(DISTURBANCE_KINDS)), ", ".join),
    "disturbance_vector": (_vector, _fmt_vector),
    "plot_slice": (_plot_slice, lambda v: f"{v[0]}={_fmt_real(v[1])}"),
    "output_dir": (_text, str),
    "seed": (_int, str),
}

def parse_experiment_config(text: str) -> Experiment:
    """
    Parse an experiment file and check it for consistency. Settings not
    in the file take their defaults.

    :raise ConfigError: naming the line and key of the first problem.
    """
    values, lines = {}, {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError("expected 'key = value'", line=number)
        if key not in KEYS:
            raise ConfigError("unknown key", line=number, key=key)
        if key in values:
            raise ConfigError(
                f"repeated (first set on line {lines[key]})", line=number, key=key
            )
        try:
            values[key] = KEYS[key][0](value)
        except ValueError as e:
            raise ConfigError(str(e), line=number, key=key) from None
        lines[key] = number
    for key in REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"required key {key!r} missing", key=key)
    exp = Experiment(**values)
    _validate(exp, lines)
    return exp


def _validate(exp: Experiment, lines: dict) -> None:
    """INTERNAL USE: cross-key checks, raised against the offending key."""

    def fail(message: str, key: str):
        raise ConfigError(message, line=lines.get(key), key=key)

    model = make_model(exp.model, speed=exp.speed, u_max=exp.u_max, d_max=exp.d_max)
    ndim = len(exp.resolved_grid_lo)
    if len(exp.resolved_grid_hi) != ndim or len(exp.resolved_grid_n) != ndim:
        fail("grid_lo, grid_hi and grid_n must have the same length", "grid_n")
    if exp.grid_periodic is not None and len(exp.grid_periodic) != ndim:
        fail(f"must list {ndim} flags", "grid_periodic")
    if ndim != model.n_x:
        fail(f"{exp.model} has {model.n_x} state dimensions, grid has {ndim}", "grid_lo")
    spec = exp.grid_spec(model.periodic_dims)
    try:
        spec.validate()
    except GridSpecError as e:
        fail(str(e), "grid_n")
    if max_dimension(exp.resolved_target) > ndim:
        fail("shape refers to a dimension the grid does not have", "target")
    if not exp.gamma:
        fail("at least one gamma is required", "gamma")

    reference = exp.resolved_reference
    allowed = REFERENCE_MODELS.get(reference)
    if allowed is not None and exp.model not in allowed:
        fail(f"{reference} reference does not apply to {exp.model}", "reference")
    if len(exp.resolved_gains) != len(DEFAULT_GAINS[reference]):
        fail(
            f"{reference} reference takes {len(DEFAULT_GAINS[reference])} gains",
            "reference_gains",
        )
    if exp.goal is not None and not 1 <= len(exp.goal) <= ndim:
        fail(f"must list between 1 and {ndim} coordinates", "goal")

    for k, x in enumerate(exp.x0):
        if len(x) != ndim:
            fail(f"start {k} has {len(x)} coordinates, expected {ndim}", "x0")
        for i, xi in enumerate(x):
            # Periodic coordinates wrap onto the grid.
            if not spec.periodic[i] and not spec.lo[i] <= xi <= spec.hi[i]:
                fail(
                    f"start {k} lies outside the grid: coordinate {i} = {xi!r} "
                    f"is not in [{spec.lo[i]!r}, {spec.hi[i]!r}]",
                    "x0",
                )
    t0 = exp.resolved_t0
    if not exp.horizon <= t0 <= 0:
        fail(f"must lie in [{exp.horizon!r}, 0]", "t0")
    if WORST_CASE in exp.disturbance and model.n_d == 0:
        fail(f"{exp.model} has no disturbance input", "disturbance")
    if exp.disturbance_vector is not None:
        if len(exp.disturbance_vector) != model.n_d:
            fail(f"must have {model.n_d} entries", "disturbance_vector")
        if not model.d_box.contains(exp.disturbance_vector):
            fail(f"lies outside the disturbance bounds {model.d_box!r}", "disturbance_vector")
    if exp.plot_slice is not None:
        if ndim != 3:
            fail("only 3D models are sliced for plotting", "plot_slice")
        if not 0 <= exp.plot_slice[0] < ndim:
            fail(f"dimension must lie in [0, {ndim})", "plot_slice")


def format_experiment_config(exp: Experiment) -> str:
    """
    Canonical text of ``exp``: one line per setting that is not None.
    Parsing the result yields an equal ``Experiment``.
    """
    out = []
    for key, (_, formatter) in KEYS.items():
        value = getattr(exp, key)
        if value is None or (key == "x0" and not value):
            continue
        out.append(f"{key} = {formatter(value)}")
    return "\n".join(out) + "\n"


__all__ = [
    "REQUIRED_KEYS",
    "REFERENCE_KINDS",
    "ConfigError",
    "split_top_level",
    "parse_experiment_config",
    "format_experiment_config",
]
