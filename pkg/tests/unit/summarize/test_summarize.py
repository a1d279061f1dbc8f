import math
import unittest

import numpy as np

from backend.cbvf_solver import ValueFunction
from backend.simulation import Metrics
from backend.state_grid import GridSpec, ScalarField, build_grid
from backend.summarize import (
    METRIC_COLUMNS,
    format_summary,
    metrics_table,
    summarize_metrics,
    summarize_value_function,
)


def example_metrics(**kw) -> Metrics:
    fields = dict(
        min_l=0.25,
        min_B=0.1,
        target_reached=True,
        final_state=np.array([0.5, -0.25]),
        control_effort=1.5,
        relaxation_count=2,
        time_to_target=-1.0,
    )
    fields.update(kw)
    return Metrics(**fields)


class TestSummarizeValueFunction(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        grid = build_grid(GridSpec(lo=[-1], hi=[1], n=[5]))
        l_field = ScalarField(grid, [-1.0, 0.0, 1.0, 0.0, -1.0])
        final = ScalarField(grid, [-1.0, -0.5, 0.5, -0.5, -1.0])
        cls.vf = ValueFunction(grid, [0.0, -2.0], [l_field, final], 0.5, "single_integrator_1d")

    def test_summary(self):
        summary = summarize_value_function(self.vf)
        self.assertEqual("single_integrator_1d", summary["Model"])
        self.assertEqual(0.5, summary["Gamma"])
        self.assertEqual("unknown", summary["Solve Settings"])
        self.assertEqual([-2.0, 0.0], summary["Time Range"])
        self.assertEqual(2, summary["Slice Count"])
        self.assertEqual(-1.0, summary["Final Slice Min"])
        self.assertEqual(0.5, summary["Final Slice Max"])
        self.assertAlmostEqual(0.2, summary["Safe Fraction"])
        self.assertEqual(
            [{"lo": -1.0, "hi": 1.0, "n": 5, "periodic": False}], summary["Grid"]
        )

    def test_format_summary(self):
        text = format_summary(summarize_value_function(self.vf))
        self.assertIn("Model: single_integrator_1d", text)
        self.assertIn("  [0] lo=-1.0, hi=1.0, n=5, periodic=False", text)


class TestSummarizeMetrics(unittest.TestCase):

    def test_flat_dict(self):
        summary = summarize_metrics(example_metrics())
        self.assertEqual(METRIC_COLUMNS, sorted(summary, key=METRIC_COLUMNS.index))
        self.assertEqual("0.5 -0.25", summary["final_state"])
        self.assertIs(True, summary["target_reached"])

    def test_nan_time_to_target(self):
        summary = summarize_metrics(example_metrics(target_reached=False, time_to_target=math.nan))
        self.assertTrue(math.isnan(summary["time_to_target"]))

    def test_table_columns(self):
        rows = [
            {"run": "a", "gamma": 0.0, **summarize_metrics(example_metrics())},
            {"run": "b", "gamma": 0.5, **summarize_metrics(example_metrics(min_l=-0.1))},
        ]
        table = metrics_table(rows)
        self.assertEqual(["run", "gamma"] + METRIC_COLUMNS, list(table.columns))
        self.assertEqual([0.25, -0.1], table["min_l"].tolist())

    def test_empty_table(self):
        self.assertEqual(METRIC_COLUMNS, list(metrics_table([]).columns))


if __name__ == "__main__":
    unittest.main()
