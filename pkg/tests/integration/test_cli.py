"""
Integration tests for the command-line interface: run the experiment
commands on a small 1D experiment and check their artifacts, output and
exit statuses.
"""

import filecmp
import os
import tempfile
import unittest

import numpy as np

from backend.cbvf_solver import SolveConfig, solve_cbvf
from backend.database import export_value_function
from backend.experiment import EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK
from backend.state_grid import GridSpec, ScalarField, build_grid
from backend.system_models import make_double_integrator
from create_app import Config, create_app

CONFIG = """
# Control-only integrator, disturbed.
model = single_integrator_1d
label = si
d_max = 0.1
gamma = 0.5
horizon = -1
controllers = cbvf_qp, optimal, least_restrictive
x0 = [0.5], [-0.8]
disturbance = zero, worst_case
"""

NON_CONVERGING = """
model = single_integrator_1d
label = si_lost
d_max = 2
horizon = -0.1
controllers = cbf_qp
max_steps = 3
"""


def make_app(output_dir: str, cache_solves: bool = True):
    config = type(
        "TestConfig",
        (Config,),
        {"CBVF_OUTPUT_DIR": output_dir, "CBVF_CACHE_SOLVES": cache_solves},
    )
    return create_app(config)


class TestCli(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.config_path = self.path("si.cfg")
        with open(self.config_path, "w") as f:
            f.write(CONFIG)

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, *parts):
        return os.path.join(self.tmp.name, *parts)

    def invoke(self, output_dir, *args, cache_solves=True):
        app = make_app(output_dir, cache_solves)
        return app, app.test_cli_runner().invoke(args=list(args))

    def test_solve(self):
        app, result = self.invoke(self.path("out"), "solve", self.config_path)
        self.assertEqual(EXIT_OK, result.exit_code, result.output)
        self.assertTrue(os.path.isfile(self.path("out", "si_g0p5.cbvf")))
        self.assertEqual(1, app.metrics.get("solves"))

    def test_second_solve_is_cached(self):
        self.invoke(self.path("out"), "solve", self.config_path)
        app, result = self.invoke(self.path("out"), "solve", self.config_path)
        self.assertEqual(EXIT_OK, result.exit_code, result.output)
        self.assertEqual(0, app.metrics.get("solves"))
        self.assertEqual(1, app.metrics.get("cache_hits"))

    def test_simulate_is_deterministic(self):
        for run in ("a", "b"):
            _, result = self.invoke(
                self.path(run), "simulate", self.config_path, cache_solves=False
            )
            self.assertEqual(EXIT_OK, result.exit_code, result.output)
        csvs = sorted(name for name in os.listdir(self.path("a")) if name.endswith(".csv"))
        # Three controllers, two disturbances, two starts.
        self.assertEqual(12, len([n for n in csvs if n.startswith("traj_")]))
        self.assertIn("summary.csv", csvs)
        match, mismatch, errors = filecmp.cmpfiles(
            self.path("a"), self.path("b"), csvs, shallow=False
        )
        self.assertEqual([], mismatch + errors)

    def test_compare_prints_table(self):
        _, result = self.invoke(self.path("out"), "compare", self.config_path)
        self.assertEqual(EXIT_OK, result.exit_code, result.output)
        self.assertIn("min_l", result.output)
        self.assertIn("least_restrictive", result.output)

    def test_info(self):
        self.invoke(self.path("out"), "solve", self.config_path)
        _, result = self.invoke(
            self.path("out"), "info", self.path("out", "si_g0p5.cbvf")
        )
        self.assertEqual(EXIT_OK, result.exit_code, result.output)
        self.assertIn("Model: single_integrator_1d", result.output)
        self.assertIn("Gamma: 0.5", result.output)

    def test_levelset(self):
        grid = build_grid(GridSpec(lo=[-1.5, -2.5], hi=[5.5, 2.5], n=[29, 21]))
        z, v = grid.states[..., 0], grid.states[..., 1]
        l_field = ScalarField(grid, np.minimum.reduce([z + 1, 5 - z, v + 2, 2 - v]))
        vf = solve_cbvf(make_double_integrator(), l_field, SolveConfig(gamma=0.2, horizon=-0.5))
        export_value_function(vf, self.path("di.cbvf"))
        _, result = self.invoke(
            self.path("out"),
            "levelset",
            self.path("di.cbvf"),
            "--time=-0.5",
            "--out",
            self.path("levels.csv"),
        )
        self.assertEqual(EXIT_OK, result.exit_code, result.output)
        self.assertTrue(os.path.isfile(self.path("levels.csv")))

    def test_config_error(self):
        with open(self.path("bad.cfg"), "w") as f:
            f.write("model = single_integrator_1d\ncontrollers = mpc\n")
        _, result = self.invoke(self.path("out"), "solve", self.path("bad.cfg"))
        self.assertEqual(EXIT_CONFIG, result.exit_code)
        self.assertFalse(os.path.exists(self.path("out")))

    def test_start_outside_grid(self):
        with open(self.path("far.cfg"), "w") as f:
            f.write("model = single_integrator_1d\nlabel = far\nx0 = [3]\n")
        for command in ("solve", "simulate"):
            with self.subTest(command=command):
                _, result = self.invoke(self.path("out"), command, self.path("far.cfg"))
                self.assertEqual(EXIT_CONFIG, result.exit_code)
                self.assertIn("x0", result.output)
                self.assertFalse(os.path.exists(self.path("out")))

    def test_missing_config(self):
        _, result = self.invoke(self.path("out"), "solve", self.path("missing.cfg"))
        self.assertEqual(EXIT_IO, result.exit_code)

    def test_malformed_container(self):
        with open(self.path("junk.cbvf"), "wb") as f:
            f.write(b"not a container")
        _, result = self.invoke(self.path("out"), "info", self.path("junk.cbvf"))
        self.assertEqual(EXIT_IO, result.exit_code)

    def test_numerical_failure(self):
        with open(self.path("lost.cfg"), "w") as f:
            f.write(NON_CONVERGING)
        _, result = self.invoke(self.path("out"), "solve", self.path("lost.cfg"))
        self.assertEqual(EXIT_NUMERICAL, result.exit_code)


if __name__ == "__main__":
    unittest.main()
