"""
Closed-form maximin Hamiltonian of a control-affine model and its
Lax-Friedrichs discretization.
"""

from __future__ import annotations

import numpy as np

from backend.state_grid import Grid
from backend.system_models import Box, ControlAffineModel


def maximin_terms(
    costate: np.ndarray,
    p: np.ndarray,
    q: np.ndarray,
    r: np.ndarray,
    u_box: Box,
    d_box: Box,
) -> np.ndarray:
    """
    INTERNAL USE:

    ``max_u min_d costate . (p + q u + r d)`` over boxes, vectorized over
    leading axes. ``costate`` and ``p`` are ``(..., n_x)``; ``q`` and
    ``r`` are ``(..., n_x, n_u)`` and ``(..., n_x, n_d)``.
    """
    drift = np.sum(costate * p, axis=-1)
    c_u = np.einsum("...i,...ij->...j", costate, q)
    control = np.sum(np.maximum(c_u * u_box.max, c_u * u_box.min), axis=-1)
    if d_box.channels == 0:
        return drift + control
    c_d = np.einsum("...i,...ij->...j", costate, r)
    disturbance = np.sum(np.minimum(c_d * d_box.min, c_d * d_box.max), axis=-1)
    return drift + control + disturbance


def _channel_coefficients(matrix: np.ndarray) -> list[list[tuple[int, object]]]:
    """
    INTERNAL USE:

    For each input channel ``j`` of ``matrix`` (``(..., n_x, n_in)``), the
    state dimensions with a nonzero coefficient and that coefficient, as a
    float when it is the same at every node.
    """
    channels = []
    for j in range(matrix.shape[-1]):
        entries = []
        for i in range(matrix.shape[-2]):
            coeff = matrix[..., i, j]
            if not np.any(coeff):
                continue
            first = float(coeff.flat[0])
            entries.append((i, first if np.all(coeff == first) else np.array(coeff)))
        channels.append(entries)
    return channels


def _contract(entries, costate):
    total = None
    for i, coeff in entries:
        term = coeff * costate[i]
        total = term if total is None else total + term
    return total


class GridHamiltonian:
    """
    ``max_u min_d costate . f(x, u, d)`` at every node of a grid, with the
    model terms evaluated once. Entries of ``p``, ``q`` and ``r`` that are
    zero everywhere are skipped.
    """

    def __init__(self, p: np.ndarray, q: np.ndarray, r: np.ndarray, u_box: Box, d_box: Box) -> None:
        self.drift = [(i, p[..., i]) for i in range(p.shape[-1]) if np.any(p[..., i])]
        self.control = _channel_coefficients(q)
        self.disturbance = _channel_coefficients(r) if d_box.channels else []
        self.u_box = u_box
        self.d_box = d_box

    def __call__(self, costate) -> np.ndarray:
        """
        :param costate: One node array per state dimension.
        """
        total = np.zeros(np.shape(costate[0]))
        for i, coeff in self.drift:
            total += coeff * costate[i]
        mid, half = self.u_box.midpoint, self.u_box.half_width
        for j, entries in enumerate(self.control):
            c = _contract(entries, costate)
            if c is None:
                continue
            if mid[j]:
                total += mid[j] * c
            total += half[j] * np.abs(c)
        mid, half = self.d_box.midpoint, self.d_box.half_width
        for j, entries in enumerate(self.disturbance):
            c = _contract(entries, costate)
            if c is None:
                continue
            if mid[j]:
                total += mid[j] * c
            total -= half[j] * np.abs(c)
        return total


def hamiltonian(model: ControlAffineModel, x, costate) -> float:
    """
    Exact ``max_u min_d costate . f(x, u, d)`` for the model's boxes.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    costate = np.asarray(costate, dtype=float).reshape(-1)
    if costate.size != model.n_x:
        raise ValueError(
            f"Costate has {costate.size} entries; {model.name!r} expects {model.n_x}."
        )
    value = maximin_terms(
        costate, model.p(x), model.q(x), model.r(x), model.u_box, model.d_box
    )
    return float(value)


def dissipation_from_terms(
    p: np.ndarray, q: np.ndarray, r: np.ndarray, u_box: Box, d_box: Box
) -> np.ndarray:
    """
    INTERNAL USE:

    Per-dimension maximum of ``|f_i|`` over the supplied states and
    every corner of the input boxes. Since ``f`` is affine in ``(u, d)``,
    the maximum over corners is ``|f_i(mid)| + sum_j |q_ij| hw_j + ...``.
    """
    n_x = p.shape[-1]
    center = p + q @ u_box.midpoint
    spread = np.abs(q) @ u_box.half_width
    if d_box.channels:
        center = center + r @ d_box.midpoint
        spread = spread + np.abs(r) @ d_box.half_width
    bound = np.abs(center) + spread
    return bound.reshape(-1, n_x).max(axis=0)


def dissipation_bounds(model: ControlAffineModel, grid: Grid) -> np.ndarray:
    """
    Lax-Friedrichs dissipation coefficients: for each state dimension,
    the largest ``|f_i(x, u, d)|`` over every grid node and every corner
    of ``u_box`` and ``d_box``.
    """
    if grid.ndim != model.n_x:
        raise ValueError(
            f"Grid has {grid.ndim} dimensions; {model.name!r} has {model.n_x} states."
        )
    states = grid.states
    return dissipation_from_terms(
        model.p(states), model.q(states), model.r(states), model.u_box, model.d_box
    )


def numerical_hamiltonian(
    model: ControlAffineModel, x, d_minus, d_plus, alpha
) -> float:
    """
    Local Lax-Friedrichs Hamiltonian: the exact Hamiltonian at the average
    of the one-sided costates, plus dissipation
    ``sum_i alpha_i (Dplus_i - Dminus_i) / 2``. The dissipation enters with
    a plus sign because the solver integrates backward in time; with this
    sign the explicit update is monotone.
    """
    d_minus = np.asarray(d_minus, dtype=float).reshape(-1)
    d_plus = np.asarray(d_plus, dtype=float).reshape(-1)
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    average = 0.5 * (d_minus + d_plus)
    dissipation = float(np.sum(alpha * (d_plus - d_minus)) / 2.0)
    return hamiltonian(model, x, average) + dissipation


__all__ = [
    "maximin_terms",
    "GridHamiltonian",
    "hamiltonian",
    "dissipation_from_terms",
    "dissipation_bounds",
    "numerical_hamiltonian",
]
