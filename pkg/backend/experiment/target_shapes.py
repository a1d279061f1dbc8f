"""
Safety targets ``l(x)`` described by small shape expressions::

    box(lo=[-1, -2], hi=[5, 2])
    circle_complement(center=[0, 0], radius=1, dims=[0, 1])
    min_of(box(...), circle_complement(...))

``l`` is positive on the safe side of each shape. ``min_of`` intersects
safe sets and ``max_of`` unites them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from backend.state_grid import Grid, ScalarField

BOX = "box"
BOX_COMPLEMENT = "box_complement"
CIRCLE_COMPLEMENT = "circle_complement"
MIN_OF = "min_of"
MAX_OF = "max_of"

# Parameter names, and whether each is required, for the primitive shapes.
PRIMITIVE_PARAMS = {
    BOX: {"lo": True, "hi": True, "dims": False},
    BOX_COMPLEMENT: {"lo": True, "hi": True, "dims": False},
    CIRCLE_COMPLEMENT: {"center": True, "radius": True, "dims": False},
}
COMBINATORS = (MIN_OF, MAX_OF)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<punct>[()\[\],=]))"
)


class ShapeSyntaxError(ValueError):
    """A shape expression could not be parsed or is inconsistent."""


@dataclass
class ShapeSpec:
    kind: str
    params: dict = field(default_factory=dict)
    children: tuple = ()


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise ShapeSyntaxError(f"Unexpected character {text[pos]!r} in shape {text!r}.")
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
        pos = match.end()
    return tokens


class _ShapeParser:
    """INTERNAL USE: recursive-descent parser over a token list."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind: str = None, value: str = None) -> str:
        tok_kind, tok_value = self.peek()
        if tok_kind is None:
            raise ShapeSyntaxError(f"Shape {self.text!r} ends unexpectedly.")
        if (kind is not None and tok_kind != kind) or (value is not None and tok_value != value):
            expected = value or kind
            raise ShapeSyntaxError(
                f"Expected {expected!r} but found {tok_value!r} in shape {self.text!r}."
            )
        self.pos += 1
        return tok_value

    def parse(self) -> ShapeSpec:
        shape = self.shape()
        if self.pos != len(self.tokens):
            raise ShapeSyntaxError(f"Trailing text after shape in {self.text!r}.")
        return shape

    def shape(self) -> ShapeSpec:
        kind = self.take("name")
        self.take("punct", "(")
        if kind in COMBINATORS:
            children = [self.shape()]
            while self.peek() == ("punct", ","):
                self.take()
                children.append(self.shape())
            self.take("punct", ")")
            return ShapeSpec(kind, {}, tuple(children))
        if kind not in PRIMITIVE_PARAMS:
            raise ShapeSyntaxError(f"Unknown shape {kind!r}.")
        params = {}
        while True:
            name = self.take("name")
            if name not in PRIMITIVE_PARAMS[kind]:
                raise ShapeSyntaxError(f"Shape {kind!r} has no parameter {name!r}.")
            if name in params:
                raise ShapeSyntaxError(f"Parameter {name!r} repeated in shape {kind!r}.")
            self.take("punct", "=")
            if self.peek() == ("punct", "["):
                params[name] = self.vector()
            else:
                params[name] = float(self.take("num"))
            if self.peek() == ("punct", ","):
                self.take()
                continue
            self.take("punct", ")")
            break
        return _checked_primitive(kind, params)

    def vector(self) -> tuple[float, ...]:
        self.take("punct", "[")
        values = [float(self.take("num"))]
        while self.peek() == ("punct", ","):
            self.take()
            values.append(float(self.take("num")))
        self.take("punct", "]")
        return tuple(values)


def _checked_primitive(kind: str, params: dict) -> ShapeSpec:
    """INTERNAL USE: validate parameter types and sizes of a primitive."""
    for name, required in PRIMITIVE_PARAMS[kind].items():
        if required and name not in params:
            raise ShapeSyntaxError(f"Shape {kind!r} needs parameter {name!r}.")
    vector_names = ("center",) if kind == CIRCLE_COMPLEMENT else ("lo", "hi")
    for name in vector_names:
        if not isinstance(params[name], tuple):
            raise ShapeSyntaxError(f"Parameter {name!r} of {kind!r} must be a vector.")
    if kind == CIRCLE_COMPLEMENT:
        if isinstance(params["radius"], tuple) or not params["radius"] > 0:
            raise ShapeSyntaxError("circle_complement radius must be a positive number.")
        size = len(params["center"])
    else:
        size = len(params["lo"])
        if len(params["hi"]) != size:
            raise ShapeSyntaxError(f"{kind} lo and hi differ in length.")
        if any(lo > hi for lo, hi in zip(params["lo"], params["hi"])):
            raise ShapeSyntaxError(f"{kind} lo exceeds hi.")
    if "dims" in params:
        dims = params["dims"]
        if not isinstance(dims, tuple) or any(d != int(d) or d < 0 for d in dims):
            raise ShapeSyntaxError(f"dims of {kind!r} must be a vector of indices.")
        if len(dims) != size:
            raise ShapeSyntaxError(f"dims of {kind!r} must list {size} dimensions.")
        params["dims"] = tuple(int(d) for d in dims)
    return ShapeSpec(kind, params, ())


def parse_shape(text: str) -> ShapeSpec:
    """
    :raise ShapeSyntaxError: if ``text`` is not a valid shape expression.
    """
    return _ShapeParser(text).parse()


def _fmt_vector(values) -> str:
    return "[" + ", ".join(repr(float(v)) for v in values) + "]"


def format_shape(shape: ShapeSpec) -> str:
    """Canonical text of ``shape``; ``parse_shape`` reproduces it exactly."""
    if shape.kind in COMBINATORS:
        return f"{shape.kind}(" + ", ".join(format_shape(c) for c in shape.children) + ")"
    parts = []
    for name in PRIMITIVE_PARAMS[shape.kind]:
        if name not in shape.params:
            continue
        value = shape.params[name]
        if name == "dims":
            parts.append("dims=[" + ", ".join(str(d) for d in value) + "]")
        elif isinstance(value, tuple):
            parts.append(f"{name}={_fmt_vector(value)}")
        else:
            parts.append(f"{name}={float(value)!r}")
    return f"{shape.kind}(" + ", ".join(parts) + ")"


def max_dimension(shape: ShapeSpec) -> int:
    """Largest state index the shape refers to, plus one."""
    if shape.kind in COMBINATORS:
        return max(max_dimension(c) for c in shape.children)
    size = len(shape.params.get("center", shape.params.get("lo", ())))
    dims = shape.params.get("dims", tuple(range(size)))
    return max(dims) + 1


def _evaluate(shape: ShapeSpec, states: np.ndarray) -> np.ndarray:
    if shape.kind == MIN_OF:
        return np.minimum.reduce([_evaluate(c, states) for c in shape.children])
    if shape.kind == MAX_OF:
        return np.maximum.reduce([_evaluate(c, states) for c in shape.children])
    params = shape.params
    size = len(params.get("center", params.get("lo", ())))
    dims = list(params.get("dims", range(size)))
    sub = states[..., dims]
    if shape.kind == CIRCLE_COMPLEMENT:
        center = np.array(params["center"])
        return np.linalg.norm(sub - center, axis=-1) - params["radius"]
    lo, hi = np.array(params["lo"]), np.array(params["hi"])
    if shape.kind == BOX:
        return np.min(np.minimum(sub - lo, hi - sub), axis=-1)
    return np.max(np.maximum(lo - sub, sub - hi), axis=-1)


def build_target_field(shape: ShapeSpec, grid: Grid) -> ScalarField:
    """
    Sample the shape's ``l`` at every node of ``grid``.

    :raise ShapeSyntaxError: if the shape refers to dimensions the grid
     does not have.
    """
    if max_dimension(shape) > grid.ndim:
        raise ShapeSyntaxError(
            f"Shape refers to dimension {max_dimension(shape) - 1} of a {grid.ndim}D grid."
        )
    return ScalarField(grid, _evaluate(shape, grid.states))


__all__ = [
    "BOX",
    "BOX_COMPLEMENT",
    "CIRCLE_COMPLEMENT",
    "MIN_OF",
    "MAX_OF",
    "ShapeSyntaxError",
    "ShapeSpec",
    "parse_shape",
    "format_shape",
    "max_dimension",
    "build_target_field",
]
