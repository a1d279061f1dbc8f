import math
import unittest

import numpy as np

from backend.state_grid import (
    GridSpec,
    GridSpecError,
    OutOfDomainError,
    ScalarField,
    build_grid,
    gradient_at,
    interpolate_value,
    interpolate_values,
    slice_field,
    upwind_derivatives,
)


def field_from(grid, fn) -> ScalarField:
    """Sample ``fn`` (taking the node-state array) at every node."""
    return ScalarField(grid, fn(grid.states))


class TestBuildGrid(unittest.TestCase):

    def test_dx_non_periodic(self):
        grid = build_grid(GridSpec(lo=[0], hi=[1], n=[11], periodic=[False]))
        self.assertAlmostEqual(0.1, grid.dx[0], places=15)

    def test_dx_periodic(self):
        grid = build_grid(GridSpec(lo=[0], hi=[2 * math.pi], n=[60], periodic=[True]))
        self.assertAlmostEqual(2 * math.pi / 60, grid.dx[0], places=15)

    def test_node_coordinates(self):
        grid = build_grid(GridSpec(lo=[-1, 2], hi=[1, 3], n=[5, 3]))
        np.testing.assert_array_equal([-1, -0.5, 0, 0.5, 1], grid.coordinates(0))
        self.assertEqual((5, 3, 2), grid.states.shape)
        np.testing.assert_array_equal([0.5, 2.5], grid.states[3, 1])

    def test_empty_extent_rejected(self):
        with self.assertRaises(GridSpecError) as ctx:
            build_grid(GridSpec(lo=[1], hi=[1], n=[11]))
        self.assertEqual(0, ctx.exception.dim)

    def test_too_few_nodes_names_dimension(self):
        with self.assertRaises(GridSpecError) as ctx:
            build_grid(GridSpec(lo=[0, 0], hi=[1, 1], n=[5, 2]))
        self.assertEqual(1, ctx.exception.dim)

    def test_too_many_dimensions(self):
        with self.assertRaises(GridSpecError):
            build_grid(GridSpec(lo=[0] * 5, hi=[1] * 5, n=[3] * 5))

    def test_field_must_be_finite(self):
        grid = build_grid(GridSpec(lo=[0], hi=[1], n=[3]))
        with self.assertRaises(ValueError):
            ScalarField(grid, [0.0, np.nan, 1.0])

    def test_field_size_checked(self):
        grid = build_grid(GridSpec(lo=[0], hi=[1], n=[3]))
        with self.assertRaises(ValueError):
            ScalarField(grid, [0.0, 1.0])


class TestUpwindDerivatives(unittest.TestCase):

    def test_constant_field(self):
        grid = build_grid(GridSpec(lo=[0, 0], hi=[1, 1], n=[5, 4]))
        field = ScalarField(grid, np.full(grid.shape, 7.0))
        for dim in range(2):
            minus, plus = upwind_derivatives(field, dim)
            np.testing.assert_array_equal(0.0, minus.values)
            np.testing.assert_array_equal(0.0, plus.values)

    def test_linear_field_including_boundaries(self):
        grid = build_grid(GridSpec(lo=[0], hi=[1], n=[11]))
        field = field_from(grid, lambda s: 3 * s[..., 0])
        minus, plus = upwind_derivatives(field, 0)
        np.testing.assert_allclose(3.0, minus.values, atol=1e-12)
        np.testing.assert_allclose(3.0, plus.values, atol=1e-12)

    def test_periodic_wrap(self):
        grid = build_grid(GridSpec(lo=[0], hi=[1], n=[4], periodic=[True]))
        field = ScalarField(grid, [0, 1, 0, 1])
        minus, plus = upwind_derivatives(field, 0)
        self.assertAlmostEqual(-4.0, minus.values[0])
        self.assertAlmostEqual(4.0, plus.values[0])
        self.assertAlmostEqual(-4.0, plus.values[3])

    def test_invalid_dimension(self):
        grid = build_grid(GridSpec(lo=[0], hi=[1], n=[4]))
        with self.assertRaises(ValueError):
            upwind_derivatives(ScalarField(grid, np.zeros(4)), 1)


class TestInterpolation(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.grid = build_grid(GridSpec(lo=[-1, 0], hi=[1, 2], n=[9, 7]))
        cls.bilinear = field_from(
            cls.grid, lambda s: 1 + 2 * s[..., 0] - 3 * s[..., 1] + 4 * s[..., 0] * s[..., 1]
        )

    def test_exact_at_nodes(self):
        rng = np.random.default_rng(1)
        values = rng.normal(size=self.grid.shape)
        field = ScalarField(self.grid, values)
        for i, j in [(0, 0), (3, 5), (8, 6), (4, 0)]:
            self.assertEqual(values[i, j], interpolate_value(field, self.grid.states[i, j]))

    def test_linear_1d(self):
        grid = build_grid(GridSpec(lo=[0], hi=[1], n=[3]))
        field = ScalarField(grid, [0, 1, 2])
        self.assertAlmostEqual(0.5, interpolate_value(field, [0.25]), places=14)

    def test_multilinear_reproduced(self):
        rng = np.random.default_rng(2)
        points = np.column_stack([rng.uniform(-1, 1, 50), rng.uniform(0, 2, 50)])
        expected = 1 + 2 * points[:, 0] - 3 * points[:, 1] + 4 * points[:, 0] * points[:, 1]
        np.testing.assert_allclose(
            expected, interpolate_values(self.bilinear, points), atol=1e-12
        )

    def test_out_of_domain(self):
        with self.assertRaises(OutOfDomainError) as ctx:
            interpolate_value(self.bilinear, [1.5, 1.0])
        self.assertEqual(0, ctx.exception.dim)

    def test_periodic_shift_invariance(self):
        grid = build_grid(
            GridSpec(lo=[0, 0], hi=[1, 2 * math.pi], n=[5, 24], periodic=[False, True])
        )
        field = field_from(grid, lambda s: s[..., 0] + np.sin(s[..., 1]))
        for theta in (0.3, 2.0, 6.1):
            self.assertAlmostEqual(
                interpolate_value(field, [0.4, theta]),
                interpolate_value(field, [0.4, theta + 2 * math.pi]),
                places=12,
            )


class TestGradient(unittest.TestCase):

    def test_linear_field(self):
        grid = build_grid(GridSpec(lo=[-1, -1], hi=[1, 1], n=[11, 21]))
        field = field_from(grid, lambda s: 2 * s[..., 0] - 0.5 * s[..., 1] + 3)
        np.testing.assert_allclose([2, -0.5], gradient_at(field, [0.13, -0.42]), atol=1e-12)

    def test_quadratic_at_node(self):
        grid = build_grid(GridSpec(lo=[0], hi=[2], n=[21]))
        field = field_from(grid, lambda s: s[..., 0] ** 2)
        self.assertAlmostEqual(2.0, gradient_at(field, [1.0])[0], places=10)

    def test_sine_at_origin(self):
        grid = build_grid(GridSpec(lo=[-1], hi=[1], n=[201]))
        field = field_from(grid, lambda s: np.sin(s[..., 0]))
        self.assertAlmostEqual(1.0, gradient_at(field, [0.0])[0], delta=1e-4)

    def test_second_order_convergence(self):
        errors = []
        for n in (41, 81):
            grid = build_grid(GridSpec(lo=[0], hi=[2], n=[n]))
            field = field_from(grid, lambda s: np.sin(2 * s[..., 0]))
            component = field.gradient_components[0][1:-1]
            exact = 2 * np.cos(2 * grid.coordinates(0)[1:-1])
            errors.append(np.max(np.abs(component - exact)))
        self.assertGreaterEqual(errors[0] / errors[1], 3.5)


class TestSliceField(unittest.TestCase):

    def test_linear_field_slice(self):
        grid = build_grid(GridSpec(lo=[0, 0, 0], hi=[1, 1, 1], n=[5, 6, 5]))
        field = field_from(grid, lambda s: s[..., 0] + 2 * s[..., 1] + 3 * s[..., 2])
        plane = slice_field(field, 2, 0.3)
        self.assertEqual((5, 6), plane.grid.shape)
        expected = grid.states[..., 0, 0] + 2 * grid.states[..., 0, 1] + 0.9
        np.testing.assert_allclose(expected, plane.values, atol=1e-12)

    def test_slice_at_node_is_that_plane(self):
        grid = build_grid(
            GridSpec(lo=[0, 0, 0], hi=[1, 1, 2 * math.pi], n=[4, 4, 8], periodic=[False, False, True])
        )
        rng = np.random.default_rng(3)
        field = ScalarField(grid, rng.normal(size=grid.shape))
        plane = slice_field(field, 2, grid.coordinates(2)[3])
        np.testing.assert_array_equal(field.values[:, :, 3], plane.values)

    def test_cannot_slice_1d(self):
        grid = build_grid(GridSpec(lo=[0], hi=[1], n=[4]))
        with self.assertRaises(ValueError):
            slice_field(ScalarField(grid, np.zeros(4)), 0, 0.5)


if __name__ == "__main__":
    unittest.main()
