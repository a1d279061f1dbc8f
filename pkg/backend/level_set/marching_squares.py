"""
Contours of a 2D scalar field by marching squares.

Corners of cell ``(i, j)`` are numbered 0: (i, j), 1: (i+1, j),
2: (i+1, j+1), 3: (i, j+1). Its edges are 0: corners 0-1, 1: corners
1-2, 2: corners 3-2, 3: corners 0-3. A corner is *inside* when its value
is at or above the level.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from backend.state_grid import ScalarField

_EDGE_CORNERS = ((0, 1), (1, 2), (3, 2), (0, 3))
_CORNER_OFFSETS = ((0, 0), (1, 0), (1, 1), (0, 1))

# Saddle cells, by which diagonal is inside. The cell average decides
# whether the inside corners connect (cut off the outside corners) or not.
_SADDLE_SEGMENTS = {
    # Corners 0 and 2 inside.
    (True, True): ((0, 1), (2, 3)),
    (True, False): ((3, 0), (1, 2)),
    # Corners 1 and 3 inside.
    (False, True): ((3, 0), (1, 2)),
    (False, False): ((0, 1), (2, 3)),
}


class LevelSetPolyline:
    """An ordered chain of 2D points along one contour."""

    def __init__(self, points, closed: bool = False) -> None:
        points = np.array(points, dtype=float).reshape(-1, 2)
        points.setflags(write=False)
        self.points: np.ndarray = points
        self.closed: bool = closed

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        kind = "closed" if self.closed else "open"
        return f"LevelSetPolyline<{len(self.points)} points, {kind}>"


def _edge_id(i: int, j: int, edge: int) -> tuple:
    """Global id of a cell edge, shared by the two cells that meet there."""
    if edge == 0:
        return ("x", i, j)
    if edge == 2:
        return ("x", i, j + 1)
    if edge == 1:
        return ("y", i + 1, j)
    return ("y", i, j)


def trace_contours(
    values: np.ndarray, origin, spacing, level: float = 0.0
) -> list[LevelSetPolyline]:
    """
    Contour lines of ``values`` (shape ``(nx, ny)``, sampled at
    ``origin + (i, j) * spacing``) at ``level``, joined into polylines.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError(f"Contours need a 2D array (got {values.ndim}D).")
    origin = np.asarray(origin, dtype=float)
    spacing = np.asarray(spacing, dtype=float)
    nx, ny = values.shape
    inside = values >= level

    crossing_points: dict[tuple, np.ndarray] = {}

    def crossing(i, j, edge):
        key = _edge_id(i, j, edge)
        if key not in crossing_points:
            a, b = _EDGE_CORNERS[edge]
            ia, ja = i + _CORNER_OFFSETS[a][0], j + _CORNER_OFFSETS[a][1]
            ib, jb = i + _CORNER_OFFSETS[b][0], j + _CORNER_OFFSETS[b][1]
            va, vb = values[ia, ja], values[ib, jb]
            s = (level - va) / (vb - va)
            pa = origin + spacing * (ia, ja)
            pb = origin + spacing * (ib, jb)
            crossing_points[key] = pa + s * (pb - pa)
        return key

    segments = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            corners = [inside[i + di, j + dj] for di, dj in _CORNER_OFFSETS]
            crossed = [e for e, (a, b) in enumerate(_EDGE_CORNERS) if corners[a] != corners[b]]
            if not crossed:
                continue
            if len(crossed) == 4:
                center = values[i : i + 2, j : j + 2].mean() >= level
                pairs = _SADDLE_SEGMENTS[(bool(corners[0]), bool(center))]
            else:
                pairs = (tuple(crossed),)
            for e0, e1 in pairs:
                segments.append((crossing(i, j, e0), crossing(i, j, e1)))

    return [
        LevelSetPolyline([crossing_points[key] for key in chain], closed=closed)
        for chain, closed in _join_segments(segments)
    ]


def _join_segments(segments: list[tuple]) -> list[tuple[list, bool]]:
    """
    INTERNAL USE:

    Join segments that share an edge id into chains. Open chains start
    at an edge used by a single segment; what remains are closed loops.
    """
    touching = defaultdict(list)
    for index, (a, b) in enumerate(segments):
        touching[a].append(index)
        touching[b].append(index)
    used = [False] * len(segments)

    def walk(start):
        chain = [start]
        current = start
        while True:
            step = next((s for s in touching[current] if not used[s]), None)
            if step is None:
                return chain
            used[step] = True
            a, b = segments[step]
            current = b if a == current else a
            chain.append(current)

    chains = []
    endpoints = [key for key, members in touching.items() if len(members) == 1]
    for key in endpoints:
        if any(not used[s] for s in touching[key]):
            chains.append((walk(key), False))
    for index, (a, _) in enumerate(segments):
        if not used[index]:
            chain = walk(a)
            chains.append((chain, chain[0] == chain[-1]))
    return chains


def extract_level_set(field: ScalarField, level: float = 0.0) -> list[LevelSetPolyline]:
    """
    Contours of a 2D field at ``level`` (periodic dimensions are not
    wrapped across).

    :raise ValueError: if the field is not 2D.
    """
    grid = field.grid
    if grid.ndim != 2:
        raise ValueError(
            f"Level sets are extracted from 2D fields (got {grid.ndim}D); slice it first."
        )
    return trace_contours(field.values, grid.lo, grid.dx, level)


__all__ = [
    "LevelSetPolyline",
    "trace_contours",
    "extract_level_set",
]
