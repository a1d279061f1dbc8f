import math
import unittest

import numpy as np

from backend.system_models import (
    Box,
    InputBoundsError,
    bang_bang_inputs,
    eval_dynamics,
    make_double_integrator,
    make_dubins_car,
    make_model,
    make_single_integrator_1d,
)


class TestBox(unittest.TestCase):

    def test_inverted_bounds_rejected(self):
        with self.assertRaises(ValueError):
            Box([1.0], [0.0])

    def test_contains_and_clip(self):
        box = Box([-1, 0], [1, 2])
        self.assertTrue(box.contains([0.5, 2.0]))
        self.assertFalse(box.contains([0.5, 2.1]))
        np.testing.assert_array_equal([1, 0], box.clip([3, -1]))

    def test_vertices(self):
        box = Box([-1, 0], [1, 2])
        self.assertEqual(4, len(box.vertices()))

    def test_zero_channels(self):
        box = Box([], [])
        self.assertEqual(0, box.channels)
        self.assertTrue(box.contains([]))


class TestDoubleIntegrator(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.model = make_double_integrator()

    def test_bounds(self):
        np.testing.assert_array_equal([-0.5], self.model.u_box.min)
        np.testing.assert_array_equal([0.5], self.model.u_box.max)
        np.testing.assert_array_equal([-0.2], self.model.d_box.min)
        np.testing.assert_array_equal([0.2], self.model.d_box.max)

    def test_eval_dynamics(self):
        np.testing.assert_allclose([-1, 0.5], eval_dynamics(self.model, [3, -1], [0.5], [0]))
        np.testing.assert_allclose([2.2, 0], eval_dynamics(self.model, [0, 2], [0], [0.2]))

    def test_control_out_of_bounds(self):
        with self.assertRaises(InputBoundsError):
            eval_dynamics(self.model, [0, 0], [0.6], [0])

    def test_disturbance_out_of_bounds(self):
        with self.assertRaises(InputBoundsError):
            eval_dynamics(self.model, [0, 0], [0], [-0.3])

    def test_affine_in_inputs(self):
        x = np.array([0.7, -0.4])
        u1, u2, d, a = np.array([0.3]), np.array([-0.45]), np.array([0.1]), 0.35
        mixed = eval_dynamics(self.model, x, a * u1 + (1 - a) * u2, d)
        combo = a * eval_dynamics(self.model, x, u1, d) + (1 - a) * eval_dynamics(
            self.model, x, u2, d
        )
        np.testing.assert_allclose(combo, mixed, atol=1e-15)

    def test_bang_bang(self):
        u_star, d_star = bang_bang_inputs(self.model, [1, 1], [1, -2])
        np.testing.assert_array_equal([-0.5], u_star)
        np.testing.assert_array_equal([-0.2], d_star)

    def test_bang_bang_zero_costate(self):
        u_star, d_star = bang_bang_inputs(self.model, [1, 1], [0, 0])
        np.testing.assert_array_equal([0.0], u_star)
        np.testing.assert_array_equal([0.0], d_star)


class TestDubinsCar(unittest.TestCase):

    def test_eval_dynamics(self):
        model = make_dubins_car(1.0)
        np.testing.assert_allclose([1, 0, 3], eval_dynamics(model, [0, 0, 0], [3]))
        np.testing.assert_allclose(
            [0, 1, 0], eval_dynamics(model, [0, 0, math.pi / 2], [0]), atol=1e-15
        )

    def test_bounds_and_periodicity(self):
        model = make_dubins_car()
        np.testing.assert_array_equal([-3], model.u_box.min)
        np.testing.assert_array_equal([3], model.u_box.max)
        self.assertEqual(0, model.n_d)
        self.assertEqual((2,), model.periodic_dims)
        self.assertEqual({"speed": 1.0}, model.parameters)
        self.assertEqual({"speed": 2.5}, make_dubins_car(2.5).parameters)

    def test_speed_must_be_positive(self):
        with self.assertRaises(ValueError):
            make_dubins_car(0)

    def test_bang_bang(self):
        u_star, _ = bang_bang_inputs(make_dubins_car(), [0, 0, 0], [0, 0, 1])
        np.testing.assert_array_equal([3], u_star)


class TestSingleIntegrator(unittest.TestCase):

    def test_control_only(self):
        model = make_single_integrator_1d(1, 0)
        np.testing.assert_array_equal([1], model.u_box.max)
        np.testing.assert_array_equal([0], model.d_box.max)

    def test_eval_dynamics(self):
        model = make_single_integrator_1d(1, 0.5)
        np.testing.assert_allclose([0.5], eval_dynamics(model, [0.3], [1], [-0.5]))

    def test_negative_bound_rejected(self):
        with self.assertRaises(ValueError):
            make_single_integrator_1d(-1, 0)


class TestBangBangBruteForce(unittest.TestCase):
    """The sign rule attains the maximin of ``costate . f`` over the boxes."""

    def check_model(self, model, sampler):
        rng = np.random.default_rng(7)
        us = np.linspace(model.u_box.min[0], model.u_box.max[0], 101)
        ds = (
            np.linspace(model.d_box.min[0], model.d_box.max[0], 101)
            if model.n_d
            else np.zeros((1, 0))
        )
        for _ in range(200):
            x, costate = sampler(rng), rng.normal(size=model.n_x)
            u_star, d_star = bang_bang_inputs(model, x, costate)
            value = costate @ model.flow(x, u_star, d_star)
            brute = max(
                min(costate @ model.flow(x, [u], np.atleast_1d(d)) for d in ds) for u in us
            )
            self.assertAlmostEqual(brute, value, delta=1e-9 * max(1.0, abs(value)))

    def test_double_integrator(self):
        self.check_model(make_double_integrator(), lambda rng: rng.uniform(-3, 3, 2))

    def test_dubins_car(self):
        self.check_model(
            make_dubins_car(),
            lambda rng: np.array([*rng.uniform(-3, 3, 2), rng.uniform(0, 2 * math.pi)]),
        )


class TestMakeModel(unittest.TestCase):

    def test_by_name(self):
        self.assertEqual("dubins_car", make_model("dubins_car", speed=2.0).name)

    def test_unknown_name(self):
        with self.assertRaises(KeyError):
            make_model("unicycle")


if __name__ == "__main__":
    unittest.main()
