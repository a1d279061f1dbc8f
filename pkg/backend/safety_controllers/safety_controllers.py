"""
Safe controllers built on a solved barrier-value function: the optimal
(maximin) policy, the least-restrictive switching filter, the
time-varying CBVF-QP filter and the time-invariant CBF-QP filter.

A *barrier* here is anything with ``value(x, t)``, ``gradient(x, t)``,
``time_derivative(x, t)`` and ``grid``; see ``ValueFunction`` and
``StationaryValueFunction``.
"""

from __future__ import annotations

import logging

import numpy as np

from backend.cbvf_solver import StationaryValueFunction, ValueFunction
from backend.metrics import MetricsController
from backend.state_grid import ScalarField
from backend.system_models import ControlAffineModel, bang_bang_inputs

from .min_norm_qp import (
    InfeasibleQPError,
    QPInstance,
    solve_min_norm_qp,
    feasible_control_interval,
)
from .policy import (
    Decision,
    Policy,
    OPTIMAL,
    LEAST_RESTRICTIVE,
    CBVF_QP,
    CBF_QP,
    REFERENCE,
)

RELAXATION_COUNTER = "qp_relaxations"


def qp_constraint_terms(
    vf, model: ControlAffineModel, gamma: float, x, t: float
) -> tuple[float, np.ndarray]:
    """
    Coefficients of the decay constraint ``offset + lin . u >= 0`` at
    ``(x, t)``, where ``lin = g . q(x)`` and
    ``offset = D_t B + g . p(x) + min_d g . r(x) d + gamma B`` with
    ``g`` the interpolated gradient of the barrier.

    :raise OutOfDomainError: if ``x`` lies outside the grid.
    :raise ValueError: if ``t`` lies outside the solved time range.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    g = vf.gradient(x, t)
    b = vf.value(x, t)
    dt_b = vf.time_derivative(x, t)
    lin = g @ model.q(x)
    disturbance = 0.0
    if model.n_d:
        c_d = g @ model.r(x)
        disturbance = float(
            np.sum(np.minimum(c_d * model.d_box.min, c_d * model.d_box.max))
        )
    offset = dt_b + float(g @ model.p(x)) + disturbance + gamma * b
    return float(offset), lin


def _qp_policy(
    barrier,
    model: ControlAffineModel,
    gamma: float,
    reference: Policy,
    kind: str,
    tally: MetricsController = None,
    logger: logging.Logger = None,
) -> Policy:
    """
    INTERNAL USE:

    Min-norm filter of ``reference`` through the decay constraint of
    ``barrier``. A numerically infeasible constraint is relaxed just
    enough for the best box vertex to satisfy it, and the event is
    counted in ``tally``.
    """
    if tally is not None:
        tally.ensure(RELAXATION_COUNTER, int)

    def evaluator(x, t):
        u_ref = reference(x, t)
        offset, lin = qp_constraint_terms(barrier, model, gamma, x, t)
        qp = QPInstance(u_ref, lin, offset, model.u_box)
        relaxed = False
        try:
            u = solve_min_norm_qp(qp)
        except InfeasibleQPError as e:
            relaxed = True
            qp = QPInstance(u_ref, lin, offset - e.slack, model.u_box)
            u = solve_min_norm_qp(qp)
            if tally is not None:
                tally.increment(RELAXATION_COUNTER)
            if logger is not None:
                logger.log(
                    logging.DEBUG,
                    f"Relaxed {kind} constraint by {-e.slack:.3g} at x={x.tolist()}, t={t!r}.",
                )
        feasible = None
        if model.n_u == 1:
            feasible = feasible_control_interval(qp)
        return Decision(u, kind, feasible=feasible, relaxed=relaxed)

    return Policy(evaluator, kind, model.u_box)


def cbvf_qp_policy(
    vf: ValueFunction,
    model: ControlAffineModel,
    gamma: float,
    reference: Policy,
    tally: MetricsController = None,
    logger: logging.Logger = None,
) -> Policy:
    """
    Robust CBVF-QP: the control closest to ``reference`` whose worst-case
    rate keeps ``dB/dt >= -gamma B``.
    """
    return _qp_policy(vf, model, gamma, reference, CBVF_QP, tally, logger)


def cbf_qp_policy(
    v_inf: ScalarField,
    model: ControlAffineModel,
    gamma: float,
    reference: Policy,
    tally: MetricsController = None,
    logger: logging.Logger = None,
) -> Policy:
    """
    Time-invariant CBF-QP using the infinite-horizon value as the
    barrier (no time-derivative term).
    """
    barrier = StationaryValueFunction(v_inf, model.name)
    return _qp_policy(barrier, model, gamma, reference, CBF_QP, tally, logger)


def optimal_safe_policy(vf, model: ControlAffineModel) -> Policy:
    """The pure maximin controller for the barrier's gradient."""

    def evaluator(x, t):
        u_star, _ = bang_bang_inputs(model, x, vf.gradient(x, t))
        return Decision(u_star, OPTIMAL)

    return Policy(evaluator, OPTIMAL, model.u_box)


def least_restrictive_policy(
    vf, model: ControlAffineModel, reference: Policy, epsilon: float
) -> Policy:
    """
    Apply ``reference`` while the barrier exceeds ``epsilon``; otherwise
    the optimal safe control. The decision's mode names the branch taken.
    """
    if not epsilon >= 0:
        raise ValueError(f"epsilon must be >= 0 (got {epsilon!r}).")
    optimal = optimal_safe_policy(vf, model)

    def evaluator(x, t):
        if vf.value(x, t) > epsilon:
            return Decision(reference(x, t), REFERENCE)
        return Decision(optimal(x, t), OPTIMAL)

    return Policy(evaluator, LEAST_RESTRICTIVE, model.u_box)


def default_epsilon(vf) -> float:
    """
    Switching threshold of two grid cells' worth of the steepest slope
    of the final slice along each axis.
    """
    field = vf.final_slice
    dx = field.grid.dx
    slopes = np.array([np.max(np.abs(c)) for c in field.gradient_components])
    return float(2.0 * np.max(dx * slopes))


__all__ = [
    "RELAXATION_COUNTER",
    "qp_constraint_terms",
    "cbvf_qp_policy",
    "cbf_qp_policy",
    "optimal_safe_policy",
    "least_restrictive_policy",
    "default_epsilon",
]
