"""
Exact solver for the small quadratic program

    minimize ||u - u_ref||^2  subject to  offset + lin . u >= 0,  u in box

by enumeration of active sets.
"""

from __future__ import annotations

import itertools

import numpy as np

from backend.system_models import Box

MAX_CHANNELS = 4
FEASIBILITY_TOLERANCE = 1e-9

_FREE, _AT_MIN, _AT_MAX = 0, 1, 2


class InfeasibleQPError(ValueError):
    """
    No control in the box satisfies the constraint. ``slack`` is the
    constraint value at the most favorable box vertex (negative).
    """

    def __init__(self, slack: float) -> None:
        super().__init__(
            f"QP is infeasible: best box vertex violates the constraint by {-slack!r}."
        )
        self.slack = slack


class QPInstance:
    """One min-norm filtering problem."""

    def __init__(self, u_ref, lin, offset: float, box: Box) -> None:
        u_ref = np.array(u_ref, dtype=float).reshape(-1)
        lin = np.array(lin, dtype=float).reshape(-1)
        if u_ref.size != box.channels or lin.size != box.channels:
            raise ValueError(
                f"u_ref ({u_ref.size}) and lin ({lin.size}) must match the box's "
                f"{box.channels} channels."
            )
        if box.channels > MAX_CHANNELS:
            raise ValueError(f"At most {MAX_CHANNELS} control channels are supported.")
        self.u_ref: np.ndarray = u_ref
        self.lin: np.ndarray = lin
        self.offset: float = float(offset)
        self.box: Box = box

    def slack(self, u) -> float:
        """Constraint value ``offset + lin . u`` (feasible when >= 0)."""
        return self.offset + float(self.lin @ np.asarray(u, dtype=float))

    def best_vertex_slack(self) -> float:
        """The largest constraint value attainable in the box."""
        best = np.maximum(self.lin * self.box.min, self.lin * self.box.max)
        return self.offset + float(np.sum(best))

    def __repr__(self):
        return (
            f"QPInstance(u_ref={self.u_ref.tolist()}, lin={self.lin.tolist()}, "
            f"offset={self.offset!r})"
        )


def _candidates(qp: QPInstance):
    box = qp.box
    yield np.clip(qp.u_ref, box.min, box.max)
    for pattern in itertools.product((_FREE, _AT_MIN, _AT_MAX), repeat=box.channels):
        pattern = np.array(pattern)
        u = qp.u_ref.copy()
        u[pattern == _AT_MIN] = box.min[pattern == _AT_MIN]
        u[pattern == _AT_MAX] = box.max[pattern == _AT_MAX]
        free = pattern == _FREE
        lin_free = qp.lin[free]
        norm2 = float(lin_free @ lin_free)
        if norm2 > 0:
            # Project the free channels onto the constraint boundary.
            u[free] = u[free] - qp.slack(u) * lin_free / norm2
        yield u


def solve_min_norm_qp(qp: QPInstance) -> np.ndarray:
    """
    Exact minimizer, found by solving the equality-constrained projection
    for each of the ``3**m`` free/at-min/at-max patterns (plus the clamped
    reference) and keeping the cheapest feasible candidate.

    :raise InfeasibleQPError: if no control in the box is feasible.
    """
    box = qp.box
    best = None
    best_cost = np.inf
    for u in _candidates(qp):
        if np.any(u < box.min - FEASIBILITY_TOLERANCE) or np.any(
            u > box.max + FEASIBILITY_TOLERANCE
        ):
            continue
        u = np.clip(u, box.min, box.max)
        if qp.slack(u) < -FEASIBILITY_TOLERANCE:
            continue
        cost = float(np.sum((u - qp.u_ref) ** 2))
        if cost < best_cost:
            best, best_cost = u, cost
    if best is None:
        raise InfeasibleQPError(qp.best_vertex_slack())
    return best


def kkt_residual(qp: QPInstance, u) -> float:
    """
    Largest violation of the KKT conditions at ``u``: primal feasibility,
    and stationarity ``2 (u - u_ref) = lam * lin + mu`` with ``lam >= 0``
    complementary to the constraint and each box multiplier ``mu_j``
    signed to push inward from an active bound (zero on free channels).
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    box = qp.box
    slack = qp.slack(u)
    violation = max(0.0, -slack)
    violation = max(
        violation,
        float(np.max(np.maximum(box.min - u, 0.0), initial=0.0)),
        float(np.max(np.maximum(u - box.max, 0.0), initial=0.0)),
    )
    grad = 2.0 * (u - qp.u_ref)
    scale = 1e-12 * max(1.0, float(np.max(np.abs(qp.lin), initial=0.0)))
    at_min = np.isclose(u, box.min, rtol=0.0, atol=scale)
    at_max = np.isclose(u, box.max, rtol=0.0, atol=scale)
    free = ~(at_min | at_max)

    def stationarity(lam: float) -> float:
        mu = grad - lam * qp.lin
        worst = 0.0
        if np.any(free):
            worst = float(np.max(np.abs(mu[free])))
        # At the lower bound the multiplier pushes up (mu >= 0), at the
        # upper bound it pushes down (mu <= 0); a degenerate box allows both.
        lower_only = at_min & ~at_max
        upper_only = at_max & ~at_min
        if np.any(lower_only):
            worst = max(worst, float(np.max(np.maximum(-mu[lower_only], 0.0))))
        if np.any(upper_only):
            worst = max(worst, float(np.max(np.maximum(mu[upper_only], 0.0))))
        return worst

    if abs(slack) > FEASIBILITY_TOLERANCE:
        return max(violation, stationarity(0.0))
    # Constraint active: fit lam on the free channels, then check its sign.
    lin_free = qp.lin[free]
    if np.any(free) and float(lin_free @ lin_free) > 0:
        lam = float(grad[free] @ lin_free / (lin_free @ lin_free))
    else:
        lam = _best_fixed_multiplier(grad, qp.lin, at_min, at_max)
    return max(violation, stationarity(lam), max(0.0, -lam))


def _best_fixed_multiplier(grad, lin, at_min, at_max) -> float:
    """
    INTERNAL USE:

    With every channel at a bound, pick the non-negative ``lam`` that
    minimizes the sign violations of the box multipliers.
    """
    candidates = [0.0]
    for j in range(lin.size):
        if lin[j] != 0:
            candidates.append(max(0.0, grad[j] / lin[j]))
    best_lam, best_violation = 0.0, np.inf
    for lam in sorted(candidates):
        mu = grad - lam * lin
        violation = 0.0
        for j in range(lin.size):
            if at_min[j] and not at_max[j]:
                violation = max(violation, -mu[j])
            elif at_max[j] and not at_min[j]:
                violation = max(violation, mu[j])
        if violation < best_violation:
            best_lam, best_violation = lam, violation
    return best_lam


def feasible_control_interval(qp: QPInstance) -> tuple[float, float] | None:
    """
    For a single-input QP, the interval of controls in the box that
    satisfy the constraint, or None if there are none.
    """
    if qp.box.channels != 1:
        raise ValueError("The feasible interval is defined for single-input QPs only.")
    lo, hi = float(qp.box.min[0]), float(qp.box.max[0])
    lin = float(qp.lin[0])
    if lin == 0.0:
        return (lo, hi) if qp.offset >= 0 else None
    threshold = -qp.offset / lin
    if lin > 0:
        lo = max(lo, threshold)
    else:
        hi = min(hi, threshold)
    if lo > hi:
        return None
    return lo, hi


__all__ = [
    "MAX_CHANNELS",
    "FEASIBILITY_TOLERANCE",
    "InfeasibleQPError",
    "QPInstance",
    "solve_min_norm_qp",
    "kkt_residual",
    "feasible_control_interval",
]
