from __future__ import annotations

from typing import Callable

import numpy as np

from backend.system_models import Box

OPTIMAL = "optimal"
LEAST_RESTRICTIVE = "least_restrictive"
CBVF_QP = "cbvf_qp"
CBF_QP = "cbf_qp"
REFERENCE = "reference"
POLICY_KINDS = (CBVF_QP, CBF_QP, OPTIMAL, LEAST_RESTRICTIVE, REFERENCE)


class Decision:
    """
    One evaluation of a policy: the control, the mode that produced it
    (the policy kind, or for the least-restrictive filter the branch
    taken), the QP's feasible control interval when known, and whether
    the QP constraint had to be relaxed.
    """

    def __init__(
        self,
        control,
        mode: str,
        feasible: tuple[float, float] | None = None,
        relaxed: bool = False,
    ) -> None:
        self.control: np.ndarray = np.asarray(control, dtype=float).reshape(-1)
        self.mode: str = mode
        self.feasible: tuple[float, float] | None = feasible
        self.relaxed: bool = relaxed

    def __repr__(self):
        return f"Decision(control={self.control.tolist()}, mode={self.mode!r})"


class Policy:
    """
    A state-time feedback map. ``decide`` returns the full ``Decision``;
    calling the policy returns only the control. Every control is
    clipped onto ``u_box``, so outputs lie inside it exactly.
    """

    def __init__(
        self,
        evaluator: Callable[[np.ndarray, float], Decision],
        kind: str,
        u_box: Box,
    ) -> None:
        if kind not in POLICY_KINDS:
            raise ValueError(f"Unknown policy kind {kind!r}.")
        self.evaluator = evaluator
        self.kind: str = kind
        self.u_box: Box = u_box

    @classmethod
    def from_function(
        cls, fn: Callable[[np.ndarray, float], np.ndarray], kind: str, u_box: Box
    ) -> Policy:
        """Wrap a plain ``(x, t) -> control`` function."""

        def evaluator(x, t):
            return Decision(fn(x, t), kind)

        return cls(evaluator, kind, u_box)

    def decide(self, x, t: float) -> Decision:
        decision = self.evaluator(np.asarray(x, dtype=float).reshape(-1), float(t))
        decision.control = self.u_box.clip(decision.control)
        return decision

    def __call__(self, x, t: float) -> np.ndarray:
        return self.decide(x, t).control

    def __repr__(self):
        return f"Policy<{self.kind}>"


__all__ = [
    "OPTIMAL",
    "LEAST_RESTRICTIVE",
    "CBVF_QP",
    "CBF_QP",
    "REFERENCE",
    "POLICY_KINDS",
    "Decision",
    "Policy",
]
