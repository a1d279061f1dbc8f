"""
Cartesian grids over a state space, and scalar fields sampled on them.

Node ``k`` of dimension ``i`` sits at ``lo[i] + k * dx[i]``. A
non-periodic dimension includes both ends of ``[lo, hi]``; a periodic
dimension covers ``[lo, hi)`` and wraps, so ``hi`` is the same point as
``lo``.
"""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

MAX_DIMENSIONS = 4
MIN_NODES = 3

# Coordinates up to this fraction of a cell beyond a non-periodic bound
# count as on the bound.
_SNAP_TOLERANCE = 1e-9


class GridSpecError(ValueError):
    """A ``GridSpec`` violates one of its invariants."""

    def __init__(self, message: str, dim: int = None) -> None:
        super().__init__(message)
        self.dim = dim


class OutOfDomainError(ValueError):
    """A queried state lies outside the grid on a non-periodic dimension."""

    def __init__(self, message: str, dim: int = None, coordinate: float = None) -> None:
        super().__init__(message)
        self.dim = dim
        self.coordinate = coordinate


class GridSpec:
    """Bounds, node counts and periodicity of each state dimension."""

    def __init__(
        self,
        lo: Sequence[float],
        hi: Sequence[float],
        n: Sequence[int],
        periodic: Sequence[bool] = None,
    ) -> None:
        if periodic is None:
            periodic = [False] * len(lo)
        self.lo: tuple[float, ...] = tuple(float(v) for v in lo)
        self.hi: tuple[float, ...] = tuple(float(v) for v in hi)
        self.n: tuple[int, ...] = tuple(int(v) for v in n)
        self.periodic: tuple[bool, ...] = tuple(bool(v) for v in periodic)

    @property
    def ndim(self) -> int:
        return len(self.lo)

    def validate(self) -> None:
        """
        Raise a ``GridSpecError`` naming the offending dimension if any
        invariant is violated.
        """
        ndim = self.ndim
        if not 1 <= ndim <= MAX_DIMENSIONS:
            raise GridSpecError(
                f"Grid must have between 1 and {MAX_DIMENSIONS} dimensions (got {ndim})."
            )
        for name in ("hi", "n", "periodic"):
            if len(getattr(self, name)) != ndim:
                raise GridSpecError(
                    f"`{name}` has {len(getattr(self, name))} entries; expected {ndim}."
                )
        for i in range(ndim):
            if not (np.isfinite(self.lo[i]) and np.isfinite(self.hi[i])):
                raise GridSpecError(f"Dimension {i}: bounds must be finite.", dim=i)
            if not self.lo[i] < self.hi[i]:
                raise GridSpecError(
                    f"Dimension {i}: lo ({self.lo[i]!r}) must be less than hi ({self.hi[i]!r}).",
                    dim=i,
                )
            if self.n[i] < MIN_NODES:
                raise GridSpecError(
                    f"Dimension {i}: need at least {MIN_NODES} nodes (got {self.n[i]}).",
                    dim=i,
                )

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridSpec):
            return NotImplemented
        return (
            self.lo == other.lo
            and self.hi == other.hi
            and self.n == other.n
            and self.periodic == other.periodic
        )

    def __hash__(self):
        return hash((self.lo, self.hi, self.n, self.periodic))

    def __repr__(self):
        return (
            f"GridSpec(lo={list(self.lo)}, hi={list(self.hi)}, "
            f"n={list(self.n)}, periodic={list(self.periodic)})"
        )


class Grid:
    """An immutable Cartesian grid built from a ``GridSpec``."""

    def __init__(self, spec: GridSpec) -> None:
        spec.validate()
        self.spec: GridSpec = spec
        dx = []
        for lo, hi, n, periodic in zip(spec.lo, spec.hi, spec.n, spec.periodic):
            divisor = n if periodic else n - 1
            dx.append((hi - lo) / divisor)
        self.dx: np.ndarray = np.array(dx, dtype=float)
        self.dx.setflags(write=False)

    @property
    def ndim(self) -> int:
        return self.spec.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.spec.n

    @property
    def lo(self) -> np.ndarray:
        return np.array(self.spec.lo)

    @property
    def hi(self) -> np.ndarray:
        return np.array(self.spec.hi)

    @property
    def periodic(self) -> tuple[bool, ...]:
        return self.spec.periodic

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def period(self, dim: int) -> float | None:
        """Length of a periodic dimension, or None if not periodic."""
        if not self.periodic[dim]:
            return None
        return self.spec.hi[dim] - self.spec.lo[dim]

    def coordinates(self, dim: int) -> np.ndarray:
        """Node coordinates along ``dim``."""
        return self.spec.lo[dim] + np.arange(self.shape[dim]) * self.dx[dim]

    @cached_property
    def states(self) -> np.ndarray:
        """Every node's state vector, shaped ``(*shape, ndim)``."""
        axes = [self.coordinates(i) for i in range(self.ndim)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        mesh.setflags(write=False)
        return mesh

    def wrap(self, x: np.ndarray) -> np.ndarray:
        """Map periodic coordinates of ``x`` (shape ``(..., ndim)``) into range."""
        x = np.array(x, dtype=float)
        for i in range(self.ndim):
            if self.periodic[i]:
                lo = self.spec.lo[i]
                x[..., i] = lo + np.mod(x[..., i] - lo, self.period(i))
        return x

    def contains(self, x: np.ndarray) -> bool:
        """Whether ``x`` lies inside the grid's bounds on every non-periodic dimension."""
        x = np.asarray(x, dtype=float)
        for i in range(self.ndim):
            if self.periodic[i]:
                continue
            tol = _SNAP_TOLERANCE * self.dx[i]
            if np.any(x[..., i] < self.spec.lo[i] - tol) or np.any(
                x[..., i] > self.spec.hi[i] + tol
            ):
                return False
        return True

    @cached_property
    def interpolation_axes(self) -> tuple[np.ndarray, ...]:
        """
        Node coordinates per dimension, each periodic one extended by
        ``hi`` (where node 0 repeats).
        """
        axes = []
        for i in range(self.ndim):
            coords = self.coordinates(i)
            if self.periodic[i]:
                coords = np.append(coords, self.spec.hi[i])
            coords.setflags(write=False)
            axes.append(coords)
        return tuple(axes)

    def interpolator(self, values) -> RegularGridInterpolator:
        """
        Multilinear interpolator of a node array, each periodic dimension
        closed by repeating node 0 at ``hi``. Query points must first go
        through ``locate``.
        """
        values = np.asarray(values, dtype=float)
        for i in range(self.ndim):
            if self.periodic[i]:
                values = np.concatenate([values, np.take(values, [0], axis=i)], axis=i)
        return RegularGridInterpolator(
            self.interpolation_axes, values, method="linear", bounds_error=False, fill_value=None
        )

    def locate(self, points) -> np.ndarray:
        """
        INTERNAL USE:

        Query points (shape ``(m, ndim)``) brought into the grid: periodic
        coordinates wrapped into ``[lo, hi)``, others clamped onto
        ``[lo, hi]`` when within rounding distance of a bound.

        :raise OutOfDomainError: if any point lies outside the grid on a
         non-periodic dimension.
        """
        points = np.array(np.atleast_2d(points), dtype=float)
        if points.shape[-1] != self.ndim:
            raise ValueError(
                f"State has {points.shape[-1]} coordinates; grid has {self.ndim} dimensions."
            )
        for i in range(self.ndim):
            lo, hi = self.spec.lo[i], self.spec.hi[i]
            coord = points[:, i]
            if not np.all(np.isfinite(coord)):
                raise OutOfDomainError(f"Non-finite coordinate on dimension {i}.", dim=i)
            if self.periodic[i]:
                points[:, i] = lo + np.mod(coord - lo, hi - lo)
                continue
            tol = _SNAP_TOLERANCE * self.dx[i]
            bad = (coord < lo - tol) | (coord > hi + tol)
            if np.any(bad):
                value = float(coord[np.argmax(bad)])
                raise OutOfDomainError(
                    f"Coordinate {value!r} on dimension {i} lies outside [{lo!r}, {hi!r}].",
                    dim=i,
                    coordinate=value,
                )
            points[:, i] = np.clip(coord, lo, hi)
        return points

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"Grid<{self.spec!r}>"


def build_grid(spec: GridSpec) -> Grid:
    """
    Build a ``Grid`` from ``spec``.

    :raise GridSpecError: if the spec violates an invariant.
    """
    return Grid(spec)


class ScalarField:
    """
    One real value per grid node. Values are stored as an array shaped
    like the grid (row-major, last dimension fastest) and are read-only.
    """

    def __init__(self, grid: Grid, values) -> None:
        values = np.array(values, dtype=float)
        if values.size != grid.size:
            raise ValueError(
                f"Field has {values.size} values; grid has {grid.size} nodes."
            )
        values = values.reshape(grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("Field values must all be finite.")
        values.setflags(write=False)
        self.grid: Grid = grid
        self.values: np.ndarray = values

    @property
    def flat(self) -> np.ndarray:
        """Values in storage order (row-major, last dimension fastest)."""
        return self.values.ravel()

    @cached_property
    def gradient_components(self) -> tuple[np.ndarray, ...]:
        """Central differences at every node, one array per dimension."""
        components = []
        for dim in range(self.grid.ndim):
            minus, plus = one_sided_differences(self.values, self.grid, dim)
            component = 0.5 * (minus + plus)
            component.setflags(write=False)
            components.append(component)
        return tuple(components)

    @cached_property
    def interpolator(self) -> RegularGridInterpolator:
        return self.grid.interpolator(self.values)

    @cached_property
    def gradient_interpolators(self) -> tuple[RegularGridInterpolator, ...]:
        return tuple(self.grid.interpolator(c) for c in self.gradient_components)

    def __repr__(self):
        return f"ScalarField<{self.grid.shape}>"


def one_sided_differences(
    values: np.ndarray, grid: Grid, dim: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    First-order backward and forward differences of a node array along
    ``dim``. Periodic dimensions wrap; other dimensions use one layer of
    linearly extrapolated ghost nodes (``2 * edge - inner``).
    """
    pad = [(0, 0)] * values.ndim
    pad[dim] = (1, 1)
    if grid.periodic[dim]:
        padded = np.pad(values, pad, mode="wrap")
    else:
        padded = np.pad(values, pad, mode="reflect", reflect_type="odd")
    diffs = np.diff(padded, axis=dim) / grid.dx[dim]
    n = values.shape[dim]
    lower = [slice(None)] * values.ndim
    upper = [slice(None)] * values.ndim
    lower[dim] = slice(0, n)
    upper[dim] = slice(1, n + 1)
    return diffs[tuple(lower)], diffs[tuple(upper)]


def upwind_derivatives(field: ScalarField, dim: int) -> tuple[ScalarField, ScalarField]:
    """
    Left (``Dminus``) and right (``Dplus``) one-sided derivatives of
    ``field`` along ``dim``.
    """
    if not 0 <= dim < field.grid.ndim:
        raise ValueError(f"Dimension {dim} is not valid for a {field.grid.ndim}D grid.")
    minus, plus = one_sided_differences(field.values, field.grid, dim)
    return ScalarField(field.grid, minus), ScalarField(field.grid, plus)


def interpolate_array(grid: Grid, values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """
    Multilinear interpolation of a node array at each row of ``points``
    (shape ``(m, ndim)``). Returns ``m`` values.

    :raise OutOfDomainError: if a point lies outside the grid on a
     non-periodic dimension.
    """
    return grid.interpolator(values)(grid.locate(points))


def interpolate_value(field: ScalarField, x) -> float:
    """
    Value of ``field`` at state ``x`` by multilinear interpolation.

    :raise OutOfDomainError: if ``x`` lies outside the grid on a
     non-periodic dimension.
    """
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(field.interpolator(field.grid.locate(x))[0])


def interpolate_values(field: ScalarField, points) -> np.ndarray:
    """Vectorized ``interpolate_value`` over the rows of ``points``."""
    return field.interpolator(field.grid.locate(points))


def gradient_at(field: ScalarField, x) -> np.ndarray:
    """
    Gradient of ``field`` at state ``x``: central differences at the
    nodes (one-sided at non-periodic boundaries), multilinearly
    interpolated to ``x``.
    """
    x = field.grid.locate(np.asarray(x, dtype=float).reshape(1, -1))
    return np.array([float(f(x)[0]) for f in field.gradient_interpolators])


def slice_field(field: ScalarField, dim: int, value: float) -> ScalarField:
    """
    Reduce ``field`` by one dimension, fixing coordinate ``dim`` at
    ``value`` (linear interpolation between the two bracketing node
    planes).
    """
    grid = field.grid
    if grid.ndim < 2:
        raise ValueError("Cannot slice a 1D field.")
    if not 0 <= dim < grid.ndim:
        raise ValueError(f"Dimension {dim} is not valid for a {grid.ndim}D grid.")
    keep = [i for i in range(grid.ndim) if i != dim]
    spec = grid.spec
    reduced = build_grid(
        GridSpec(
            lo=[spec.lo[i] for i in keep],
            hi=[spec.hi[i] for i in keep],
            n=[spec.n[i] for i in keep],
            periodic=[spec.periodic[i] for i in keep],
        )
    )
    points = np.insert(reduced.states.reshape(-1, reduced.ndim), dim, value, axis=1)
    plane = interpolate_values(field, points)
    return ScalarField(reduced, plane.reshape(reduced.shape))


__all__ = [
    "MAX_DIMENSIONS",
    "GridSpecError",
    "OutOfDomainError",
    "GridSpec",
    "Grid",
    "build_grid",
    "ScalarField",
    "one_sided_differences",
    "upwind_derivatives",
    "interpolate_array",
    "interpolate_value",
    "interpolate_values",
    "gradient_at",
    "slice_field",
]
