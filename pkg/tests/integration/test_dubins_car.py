"""
Integration test for the shipped Dubins car experiment. The full grid
takes minutes to solve; set CBVF_RUN_SLOW=1 to run it.
"""

import os
import tempfile
import unittest
from pathlib import Path

import pandas as pd

from backend.experiment import SUMMARY_FILE, parse_experiment_config, run_experiment

CONFIG_PATH = Path(__file__).resolve().parents[2] / "configs" / "dubins_car.cfg"

# Allowed violation of l >= 0 along a rollout, from grid interpolation.
SAFETY_SLACK = 0.05


@unittest.skipUnless(os.environ.get("CBVF_RUN_SLOW") == "1", "slow; set CBVF_RUN_SLOW=1")
class TestDubinsCarExperiment(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        exp = parse_experiment_config(CONFIG_PATH.read_text(encoding="utf-8"))
        run_experiment(exp, output_dir=cls.tmp.name)
        cls.summary = pd.read_csv(os.path.join(cls.tmp.name, SUMMARY_FILE))

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def row(self, controller: str) -> pd.Series:
        rows = self.summary[self.summary["controller"] == controller]
        self.assertEqual(1, len(rows))
        return rows.iloc[0]

    def test_both_filters_ran(self):
        self.assertEqual({"cbvf_qp", "cbf_qp"}, set(self.summary["controller"]))

    def test_filters_stay_safe(self):
        self.assertTrue((self.summary["min_l"] >= -SAFETY_SLACK).all())
        self.assertFalse(self.summary["exited_domain"].any())

    def test_only_finite_horizon_filter_reaches_goal(self):
        self.assertTrue(bool(self.row("cbvf_qp")["target_reached"]))
        self.assertFalse(bool(self.row("cbf_qp")["target_reached"]))

    def test_plot_and_stationary_value(self):
        names = os.listdir(self.tmp.name)
        self.assertIn("plot_dubins_car_g10p0.svg", names)
        self.assertIn("dubins_car_vinf.cbvf", names)


if __name__ == "__main__":
    unittest.main()
