import os
import tempfile
import unittest
import unittest.mock

import numpy as np

from backend.cbvf_solver import EULER, SolveConfig, ValueFunction, solve_request
from backend.database import FileValueFunctionDataGateway, ValueFunctionDataGateway
from backend.metrics import MetricsController
from backend.state_grid import GridSpec, ScalarField, build_grid
from backend.system_models import make_single_integrator_1d
from backend.value_function_controller import (
    CACHE_HITS,
    SOLVES,
    ValueFunctionController,
    run_id_for,
    stationary_run_id_for,
)

GRID = build_grid(GridSpec(lo=[-2], hi=[2], n=[41]))
L_FIELD = ScalarField(GRID, 1 - np.abs(GRID.coordinates(0)))
MODEL = make_single_integrator_1d(1.0, 0.5)
CFG = SolveConfig(gamma=0.2, horizon=-0.5)


def stored_value_function(
    gamma=0.2, horizon=-0.5, l_field=L_FIELD, request=solve_request(MODEL, CFG)
) -> ValueFunction:
    return ValueFunction(
        GRID,
        [0.0, horizon],
        [l_field, l_field],
        gamma,
        "single_integrator_1d",
        request=request,
    )


class TestRunIds(unittest.TestCase):

    def test_run_id_for(self):
        self.assertEqual("double_integrator_g0p2", run_id_for("double_integrator", 0.2))
        self.assertEqual("di_g0p0", run_id_for("di", 0))

    def test_stationary_run_id_for(self):
        self.assertEqual("di_vinf", stationary_run_id_for("di"))


class TestValueFunctionController(unittest.TestCase):

    def setUp(self) -> None:
        # Mock find(), insert() and update() in the store.
        self.gateway = ValueFunctionDataGateway()
        self.gateway.find = unittest.mock.MagicMock(return_value=None)
        self.gateway.insert = unittest.mock.MagicMock(return_value=None)
        self.gateway.update = unittest.mock.MagicMock(return_value=None)
        self.tally = MetricsController()
        self.controller = ValueFunctionController(gateway=self.gateway, tally=self.tally)

    def test_solves_when_not_stored(self):
        vf = self.controller.get_value_function("run", MODEL, L_FIELD, CFG)
        self.assertEqual(-0.5, vf.horizon)
        self.gateway.insert.assert_called_once_with("run", vf)
        self.assertEqual(1, self.tally.get(SOLVES))
        self.assertEqual(0, self.tally.get(CACHE_HITS))

    def test_store_after_false(self):
        self.controller.get_value_function("run", MODEL, L_FIELD, CFG, store_after=False)
        self.gateway.insert.assert_not_called()

    def test_returns_stored(self):
        stored = stored_value_function()
        self.gateway.find.return_value = stored
        self.assertIs(stored, self.controller.get_value_function("run", MODEL, L_FIELD, CFG))
        self.gateway.insert.assert_not_called()
        self.assertEqual(1, self.tally.get(CACHE_HITS))

    def test_reuse_stored_false(self):
        self.gateway.find.return_value = stored_value_function()
        self.controller.get_value_function("run", MODEL, L_FIELD, CFG, reuse_stored=False)
        self.gateway.find.assert_not_called()
        self.assertEqual(1, self.tally.get(SOLVES))

    def test_stale_stored_is_replaced(self):
        for stale in (
            stored_value_function(gamma=0.5),
            stored_value_function(horizon=-1.0),
            stored_value_function(l_field=ScalarField(GRID, np.zeros(41))),
            stored_value_function(request=None),
            stored_value_function(request=solve_request(make_single_integrator_1d(1.0, 0.9), CFG)),
            stored_value_function(request=solve_request(MODEL, SolveConfig(gamma=0.2, cfl=0.3))),
            stored_value_function(request=solve_request(MODEL, SolveConfig(time_scheme=EULER))),
            stored_value_function(request=solve_request(MODEL, SolveConfig(max_steps=10))),
            stored_value_function(
                request=solve_request(MODEL, SolveConfig(stationary_tol=1e-3))
            ),
        ):
            with self.subTest(stale=stale, request=stale.request):
                self.gateway.find.return_value = stale
                self.gateway.update.reset_mock()
                vf = self.controller.get_value_function("run", MODEL, L_FIELD, CFG)
                self.assertEqual(0.2, vf.gamma)
                self.assertEqual(solve_request(MODEL, CFG), vf.request)
                self.gateway.update.assert_called_once_with("run", vf)
                self.gateway.insert.assert_not_called()

    def test_without_gateway(self):
        controller = ValueFunctionController()
        vf = controller.get_value_function("run", MODEL, L_FIELD, CFG)
        self.assertEqual("single_integrator_1d", vf.model_name)


class TestStoredValueFunctions(unittest.TestCase):

    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.gateway = FileValueFunctionDataGateway(os.path.join(self.tmp.name, "store"))
        self.tally = MetricsController()
        self.controller = ValueFunctionController(gateway=self.gateway, tally=self.tally)

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def test_same_request_is_reused(self):
        first = self.controller.get_value_function("r", MODEL, L_FIELD, CFG)
        second = self.controller.get_value_function("r", MODEL, L_FIELD, CFG)
        np.testing.assert_array_equal(first.final_slice.values, second.final_slice.values)
        self.assertEqual(1, self.tally.get(SOLVES))
        self.assertEqual(1, self.tally.get(CACHE_HITS))

    def test_other_disturbance_bound_is_solved_again(self):
        calm = make_single_integrator_1d(1.0, 0.0)
        gusty = make_single_integrator_1d(1.0, 0.9)
        first = self.controller.get_value_function("r", calm, L_FIELD, CFG)
        second = self.controller.get_value_function("r", gusty, L_FIELD, CFG)
        self.assertEqual(2, self.tally.get(SOLVES))
        self.assertEqual(0, self.tally.get(CACHE_HITS))
        self.assertFalse(np.allclose(first.final_slice.values, second.final_slice.values))
        self.assertEqual(solve_request(gusty, CFG), self.gateway.find("r").request)

    def test_other_numerical_settings_are_solved_again(self):
        self.controller.get_value_function("r", MODEL, L_FIELD, CFG)
        self.controller.get_value_function(
            "r", MODEL, L_FIELD, SolveConfig(gamma=0.2, horizon=-0.5, cfl=0.25)
        )
        self.assertEqual(2, self.tally.get(SOLVES))


class TestStationaryField(unittest.TestCase):

    def setUp(self) -> None:
        self.gateway = ValueFunctionDataGateway()
        self.gateway.find = unittest.mock.MagicMock(return_value=None)
        self.gateway.insert = unittest.mock.MagicMock(return_value=None)
        self.gateway.update = unittest.mock.MagicMock(return_value=None)
        self.controller = ValueFunctionController(gateway=self.gateway)
        self.static = make_single_integrator_1d(0.0, 0.0)

    def test_solve_and_store_two_slices(self):
        field = self.controller.get_stationary_field(
            "vinf", self.static, L_FIELD, SolveConfig(gamma=0.0)
        )
        np.testing.assert_array_equal(L_FIELD.values, field.values)
        stored = self.gateway.insert.call_args[0][1]
        self.assertEqual(2, len(stored.slices))
        self.assertLess(stored.horizon, 0.0)

    def test_returns_stored(self):
        converged = ScalarField(GRID, np.minimum(L_FIELD.values, 0.5))
        cfg = SolveConfig(gamma=0.0)
        self.gateway.find.return_value = ValueFunction(
            GRID,
            [0.0, -3.0],
            [L_FIELD, converged],
            0.0,
            "single_integrator_1d",
            request=solve_request(self.static, cfg),
        )
        field = self.controller.get_stationary_field("vinf", self.static, L_FIELD, cfg)
        self.assertIs(converged, field)

    def test_stored_with_other_settings_is_solved_again(self):
        converged = ScalarField(GRID, np.minimum(L_FIELD.values, 0.5))
        self.gateway.find.return_value = ValueFunction(
            GRID,
            [0.0, -3.0],
            [L_FIELD, converged],
            0.0,
            "single_integrator_1d",
            request=solve_request(self.static, SolveConfig(gamma=0.0, stationary_tol=1e-2)),
        )
        field = self.controller.get_stationary_field(
            "vinf", self.static, L_FIELD, SolveConfig(gamma=0.0)
        )
        np.testing.assert_array_equal(L_FIELD.values, field.values)
        self.gateway.update.assert_called_once()
        self.gateway.insert.assert_not_called()

    def test_needs_zero_gamma(self):
        with self.assertRaises(ValueError):
            self.controller.get_stationary_field(
                "vinf", self.static, L_FIELD, SolveConfig(gamma=0.3)
            )


if __name__ == "__main__":
    unittest.main()
