import logging

import numpy as np

from backend.cbvf_solver import (
    CbvfSolver,
    SolveConfig,
    ValueFunction,
    solve_cbvf,
    solve_request,
)
from backend.database import ValueFunctionDataGateway
from backend.metrics import MetricsController
from backend.state_grid import ScalarField
from backend.system_models import ControlAffineModel

CACHE_HITS = "cache_hits"
SOLVES = "solves"


def run_id_for(label: str, gamma: float) -> str:
    """
    Run identifier of the finite-horizon solve for ``gamma``: e.g.,
    ``'double_integrator_g0p2'`` for label ``'double_integrator'`` and
    gamma 0.2.
    """
    return f"{label}_g{float(gamma)!r}".replace(".", "p").replace("-", "m")


def stationary_run_id_for(label: str) -> str:
    return f"{label}_vinf"


class ValueFunctionController:
    """
    A controller for getting solved value functions, either from the
    store configured in the ``ValueFunctionDataGateway`` or by solving.
    """

    def __init__(
        self,
        gateway: ValueFunctionDataGateway = None,
        logger: logging.Logger = None,
        tally: MetricsController = None,
    ) -> None:
        self.gateway: ValueFunctionDataGateway = gateway
        self.logger: logging.Logger = logger
        self.tally: MetricsController = tally
        if tally is not None:
            tally.ensure(CACHE_HITS, int)
            tally.ensure(SOLVES, int)

    def _log(self, msg: str) -> None:
        if self.logger is not None:
            self.logger.log(logging.INFO, msg)

    @staticmethod
    def _matches(
        vf: ValueFunction,
        model: ControlAffineModel,
        l_field: ScalarField,
        cfg: SolveConfig,
        horizon: float = None,
    ) -> bool:
        """
        INTERNAL USE:

        Whether a stored value function was solved for this request: same
        grid, model (input bounds and parameters included), gamma,
        numerical settings, horizon and safety target.
        """
        if vf.grid != l_field.grid or vf.model_name != model.name:
            return False
        if vf.gamma != cfg.gamma or vf.request != solve_request(model, cfg):
            return False
        if horizon is not None and vf.horizon != horizon:
            return False
        return np.array_equal(vf.slices[0].values, l_field.values)

    def get_value_function(
        self,
        run_id: str,
        model: ControlAffineModel,
        l_field: ScalarField,
        cfg: SolveConfig,
        store_after: bool = True,
        reuse_stored: bool = True,
    ) -> ValueFunction:
        """
        Get the value function for ``run_id``. Will first look for it in
        the configured gateway; if none is stored, or the stored one was
        solved for a different request, will solve it. Optionally, the
        solved value function is stored (replacing any stale one) if
        ``store_after=True`` (the default behavior).

        :param run_id: The unique identifier of the solve.
        :param model: The dynamics to solve for.
        :param l_field: The safety target, on the solve grid.
        :param cfg: The solve settings.
        :param store_after: Whether to store a freshly solved value
         function through the gateway.
        :param reuse_stored: Whether a stored value function may be
         returned at all. If False, always solves.
        :return: The value function.
        """
        existing = None
        if self.gateway is not None and reuse_stored:
            existing = self.gateway.find(run_id)
        stale = existing is not None and not self._matches(
            existing, model, l_field, cfg, cfg.horizon
        )
        if existing is not None and not stale:
            self._log(f"Value function {run_id!r} found in store.")
            if self.tally is not None:
                self.tally.increment(CACHE_HITS)
            return existing
        vf = solve_cbvf(model, l_field, cfg, logger=self.logger)
        if self.tally is not None:
            self.tally.increment(SOLVES)
        msg = f"Value function {run_id!r} solved"
        if store_after and self.gateway is not None:
            if stale:
                self.gateway.update(run_id, vf)
            else:
                self.gateway.insert(run_id, vf)
            msg += " and stored"
        if stale:
            msg += " (stored one was solved for a different request)"
        self._log(msg + ".")
        return vf

    def get_stationary_field(
        self,
        run_id: str,
        model: ControlAffineModel,
        l_field: ScalarField,
        cfg: SolveConfig,
        store_after: bool = True,
        reuse_stored: bool = True,
    ) -> ScalarField:
        """
        Same as ``get_value_function()``, for the infinite-horizon value.
        It is stored as a two-slice value function: ``l`` at ``t = 0`` and
        the converged field at minus the iteration time it took.
        """
        existing = None
        if self.gateway is not None and reuse_stored:
            existing = self.gateway.find(run_id)
        stale = existing is not None and not (
            len(existing.slices) == 2 and self._matches(existing, model, l_field, cfg)
        )
        if existing is not None and not stale:
            self._log(f"Stationary value {run_id!r} found in store.")
            if self.tally is not None:
                self.tally.increment(CACHE_HITS)
            return existing.final_slice
        if cfg.gamma != 0:
            raise ValueError(
                f"The stationary solve requires gamma = 0 (got {cfg.gamma!r})."
            )
        solver = CbvfSolver(model, l_field, cfg, logger=self.logger)
        field = solver.solve_stationary()
        if self.tally is not None:
            self.tally.increment(SOLVES)
        msg = f"Stationary value {run_id!r} solved"
        if store_after and self.gateway is not None:
            vf = ValueFunction(
                field.grid,
                [0.0, -solver.stationary_elapsed],
                [l_field, field],
                0.0,
                model.name,
                request=solve_request(model, cfg),
            )
            if stale:
                self.gateway.update(run_id, vf)
            else:
                self.gateway.insert(run_id, vf)
            msg += " and stored"
        self._log(msg + ".")
        return field


__all__ = [
    "CACHE_HITS",
    "SOLVES",
    "run_id_for",
    "stationary_run_id_for",
    "ValueFunctionController",
]
