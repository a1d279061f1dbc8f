import os
import tempfile
import unittest

import numpy as np

from backend.cbvf_solver import ValueFunction
from backend.database import (
    MAGIC,
    ContainerDimensionError,
    ContainerFormatError,
    ContainerTruncatedError,
    ContainerVersionError,
    FileValueFunctionDataGateway,
    dump_value_function,
    export_value_function,
    import_value_function,
    load_value_function,
)
from backend.state_grid import GridSpec, ScalarField, build_grid


def example_value_function() -> ValueFunction:
    grid = build_grid(
        GridSpec(lo=[-1.0, 0.0], hi=[1.0, 6.283185307179586], n=[5, 7], periodic=[False, True])
    )
    rng = np.random.default_rng(7)
    slices = [ScalarField(grid, rng.normal(size=grid.shape)) for _ in range(3)]
    return ValueFunction(
        grid,
        [0.0, -0.1, -0.30000000000000004],
        slices,
        0.2,
        "dubins_car",
        request="u=-3.0:3.0;d=;speed=1.0;cfl=0.5;time_scheme=tvd_rk3;stationary_tol=1e-06;max_steps=100000",
    )


class TestValueFunctionContainer(unittest.TestCase):

    def setUp(self):
        self.vf = example_value_function()
        self.data = dump_value_function(self.vf)

    def test_magic(self):
        self.assertTrue(self.data.startswith(MAGIC))

    def test_load_is_bit_exact(self):
        loaded = load_value_function(self.data)
        self.assertEqual(self.vf.grid, loaded.grid)
        self.assertEqual(self.vf.gamma, loaded.gamma)
        self.assertEqual("dubins_car", loaded.model_name)
        self.assertEqual(self.vf.request, loaded.request)
        np.testing.assert_array_equal(self.vf.times, loaded.times)
        for ours, theirs in zip(self.vf.slices, loaded.slices):
            np.testing.assert_array_equal(ours.values, theirs.values)
        self.assertEqual(self.data, dump_value_function(loaded))

    def test_request_is_optional(self):
        data = self.data.replace(b"request " + self.vf.request.encode("ascii") + b"\n", b"", 1)
        self.assertNotEqual(self.data, data)
        loaded = load_value_function(data)
        self.assertIsNone(loaded.request)
        self.assertEqual(data, dump_value_function(loaded))

    def test_request_with_whitespace(self):
        self.vf.request = "cfl=0.5 max_steps=10"
        with self.assertRaises(ValueError):
            dump_value_function(self.vf)

    def test_truncated(self):
        with self.assertRaises(ContainerTruncatedError) as ctx:
            load_value_function(self.data[:-8])
        self.assertEqual(12, ctx.exception.code)

    def test_trailing_bytes(self):
        with self.assertRaises(ContainerFormatError):
            load_value_function(self.data + b"\x00")

    def test_bad_magic(self):
        with self.assertRaises(ContainerFormatError) as ctx:
            load_value_function(b"PNG" + self.data)
        self.assertEqual(10, ctx.exception.code)

    def test_unsupported_version(self):
        with self.assertRaises(ContainerVersionError) as ctx:
            load_value_function(b"CBVF2" + self.data[len(MAGIC) - 1 :])
        self.assertEqual(11, ctx.exception.code)

    def test_dimension_mismatch(self):
        data = self.data.replace(b"ndim 2", b"ndim 3", 1)
        with self.assertRaises(ContainerDimensionError) as ctx:
            load_value_function(data)
        self.assertEqual(13, ctx.exception.code)

    def test_unknown_header_key(self):
        data = self.data.replace(b"ndim 2\n", b"ndim 2\ncolor blue\n", 1)
        with self.assertRaises(ContainerFormatError):
            load_value_function(data)

    def test_file_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "vf.cbvf")
            export_value_function(self.vf, path)
            loaded = import_value_function(path)
        np.testing.assert_array_equal(self.vf.final_slice.values, loaded.final_slice.values)

    def test_missing_file(self):
        with self.assertRaises(OSError):
            import_value_function(os.path.join(tempfile.gettempdir(), "no-such-dir", "vf.cbvf"))


class TestFileValueFunctionDataGateway(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.gateway = FileValueFunctionDataGateway(os.path.join(self.tmp.name, "store"))
        self.vf = example_value_function()

    def tearDown(self):
        self.tmp.cleanup()

    def test_find_missing(self):
        self.assertIsNone(self.gateway.find("nothing"))

    def test_insert_then_find(self):
        self.gateway.insert("run_a", self.vf)
        self.assertTrue(self.gateway.path_for("run_a").is_file())
        found = self.gateway.find("run_a")
        np.testing.assert_array_equal(self.vf.slices[1].values, found.slices[1].values)

    def test_update_replaces(self):
        self.gateway.insert("run_a", self.vf)
        replacement = ValueFunction(
            self.vf.grid, [0.0], [self.vf.final_slice], 0.0, "dubins_car"
        )
        self.gateway.update("run_a", replacement)
        found = self.gateway.find("run_a")
        self.assertEqual(1, len(found.slices))
        self.assertEqual(0.0, found.gamma)
        self.assertIsNone(found.request)

    def test_delete(self):
        self.gateway.insert("run_a", self.vf)
        self.gateway.delete("run_a")
        self.assertIsNone(self.gateway.find("run_a"))

    def test_invalid_run_id(self):
        with self.assertRaises(ValueError):
            self.gateway.path_for(os.path.join("a", "b"))
        with self.assertRaises(ValueError):
            self.gateway.path_for("")


if __name__ == "__main__":
    unittest.main()
