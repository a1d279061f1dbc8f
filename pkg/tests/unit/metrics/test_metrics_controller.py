import threading
import unittest
from datetime import timedelta

from backend.metrics import MetricsController


class TestMetricsController(unittest.TestCase):

    def test_elapsed(self):
        tally = MetricsController()
        self.assertIsInstance(tally.elapsed, timedelta)
        self.assertTrue(timedelta(0) <= tally.elapsed < timedelta(seconds=5))

    def test_new_restarts_at_zero(self):
        tally = MetricsController()
        tally.new("solves")
        tally.increment("solves")
        tally.new("solves")
        self.assertEqual(0, tally.get("solves"))

    def test_ensure_keeps_existing(self):
        tally = MetricsController()
        tally.ensure("cache_hits")
        tally.increment("cache_hits", 3)
        tally.ensure("cache_hits")
        self.assertEqual(3, tally.get("cache_hits"))

    def test_unknown_field(self):
        with self.assertRaises(KeyError):
            MetricsController().get("qp_relaxations")

    def test_snapshot_is_a_copy(self):
        tally = MetricsController()
        tally.new("solves")
        snap = tally.snapshot()
        tally.increment("solves")
        self.assertEqual({"solves": 0}, snap)
        self.assertEqual({"solves": 1}, tally.snapshot())

    def test_increment_from_threads(self):
        tally = MetricsController()
        tally.new("qp_relaxations")

        def work():
            for _ in range(1000):
                tally.increment("qp_relaxations")

        threads = [threading.Thread(target=work) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        self.assertEqual(4000, tally.get("qp_relaxations"))


if __name__ == "__main__":
    unittest.main()
