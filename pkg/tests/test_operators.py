"""Тесты для моделей оператора"""
import math
import unittest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.contour import integration_hyperbola, hyperbola_eval
from src.exceptions import InvalidConfigError, SingularResolventError
from src.models import SpectralCharacteristics
from src.operators import (
    dirichlet_grid,
    fd_laplacian_model,
    fd_min_eigenvalue,
    green_function_model,
    scalar_model,
    solve_tridiagonal,
    spectral_mode_model,
)
from src.presets import x_log_x

PI2 = math.pi ** 2


def contour_points(model, xis):
    hyp = integration_hyperbola(model.spec)
    return [hyperbola_eval(hyp, xi)[0] for xi in xis]


def relative(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


class ResolventIdentityMixin:
    """(zI-A)^-1 v - (wI-A)^-1 v = (w - z)(zI-A)^-1 (wI-A)^-1 v on random contour points"""

    xi_span = 3.0

    def make_model(self):
        raise NotImplementedError

    def random_vector(self, model, rng):
        return rng.standard_normal(model.dim) + 1j * rng.standard_normal(model.dim)

    def test_resolvent_identity(self):
        model = self.make_model()
        rng = np.random.default_rng(7)
        hyp = integration_hyperbola(model.spec)
        for _ in range(20):
            z1 = hyperbola_eval(hyp, rng.uniform(-self.xi_span, self.xi_span))[0]
            z2 = hyperbola_eval(hyp, rng.uniform(-self.xi_span, self.xi_span))[0]
            v = self.random_vector(model, rng)
            lhs = model.resolvent_apply(z1, v) - model.resolvent_apply(z2, v)
            rhs = (z2 - z1) * model.resolvent_apply(z1, model.resolvent_apply(z2, v))
            self.assertLess(relative(lhs, rhs), 1e-10)

    def test_linearity(self):
        model = self.make_model()
        rng = np.random.default_rng(11)
        z = contour_points(model, [0.7])[0]
        v = self.random_vector(model, rng)
        w = self.random_vector(model, rng)
        a, b = 0.3 - 1.2j, 2.5
        combined = model.resolvent_apply(z, a * v + b * w)
        separate = a * model.resolvent_apply(z, v) + b * model.resolvent_apply(z, w)
        self.assertLess(relative(combined, separate), 1e-12)


class TestScalarModel(ResolventIdentityMixin, unittest.TestCase):

    def make_model(self):
        return scalar_model(8.0, SpectralCharacteristics(rho0=7.0, phi=math.pi / 6))

    def test_action(self):
        model = self.make_model()
        result = model.resolvent_apply(2.0 + 1.0j, np.array([3.0]))
        self.assertAlmostEqual(result[0], 3.0 / (2.0 + 1.0j - 8.0), places=15)

    def test_eigenvalue_is_singular(self):
        with self.assertRaises(SingularResolventError):
            self.make_model().resolvent_apply(8.0, np.array([1.0]))


class TestSpectralModeModel(ResolventIdentityMixin, unittest.TestCase):

    def make_model(self):
        return spectral_mode_model(6)

    def test_at_zero(self):
        model = spectral_mode_model(3)
        v = model.mode_vector(1)
        self.assertTrue(np.allclose(model.resolvent_apply(0.0, v), -v / PI2, rtol=1e-15, atol=0))

    def test_at_twice_eigenvalue(self):
        model = spectral_mode_model(3)
        v = model.mode_vector(1)
        self.assertTrue(np.allclose(model.resolvent_apply(2 * PI2, v), v / PI2, rtol=1e-15, atol=0))

    def test_characteristics(self):
        model = spectral_mode_model(2)
        self.assertAlmostEqual(model.spec.rho0, 0.95 * PI2, places=12)
        self.assertAlmostEqual(model.spec.phi, math.pi / 6, places=15)
        self.assertAlmostEqual(model.spec.rho1, 0.475 * PI2, places=12)

    def test_eigenvalue_is_singular(self):
        model = spectral_mode_model(2)
        with self.assertRaises(SingularResolventError):
            model.resolvent_apply(4 * PI2, model.mode_vector(2))

    def test_evaluate_sine_series(self):
        model = spectral_mode_model(2)
        value = model.evaluate(np.array([1.0, 0.5]), 0.25)
        expected = math.sin(math.pi / 4) + 0.5 * math.sin(math.pi / 2)
        self.assertAlmostEqual(value.real, expected, places=14)

    def test_zero_modes_rejected(self):
        with self.assertRaises(InvalidConfigError):
            spectral_mode_model(0)

    def test_wrong_length_rejected(self):
        with self.assertRaises(InvalidConfigError):
            spectral_mode_model(2).resolvent_apply(1.0j, np.ones(3))


class TestFDLaplacianModel(ResolventIdentityMixin, unittest.TestCase):

    def make_model(self):
        return fd_laplacian_model(8)

    def test_single_point(self):
        model = fd_laplacian_model(1)
        self.assertTrue(np.array_equal(model.dense_matrix(), np.array([[8.0]])))
        result = model.resolvent_apply(1.0 + 2.0j, np.array([2.0]))
        self.assertAlmostEqual(result[0], 2.0 / (1.0 + 2.0j - 8.0), places=15)

    def test_matches_dense_solve(self):
        model = fd_laplacian_model(8)
        rng = np.random.default_rng(3)
        v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        z = -1.0 + 3.0j
        expected = np.linalg.solve(z * np.eye(8) - model.dense_matrix(), v)
        self.assertLess(relative(model.resolvent_apply(z, v), expected), 1e-12)

    def test_min_eigenvalue(self):
        self.assertAlmostEqual(fd_min_eigenvalue(100), 9.8688, places=4)
        eigenvalues = np.linalg.eigvalsh(fd_laplacian_model(8).dense_matrix())
        self.assertAlmostEqual(eigenvalues[0], fd_min_eigenvalue(8), places=10)
        self.assertAlmostEqual(fd_laplacian_model(8).spec.rho0, 0.95 * fd_min_eigenvalue(8), places=12)

    def test_eigenvalue_is_singular(self):
        model = fd_laplacian_model(1)
        with self.assertRaises(SingularResolventError):
            model.resolvent_apply(8.0, np.array([1.0]))

    def test_grid(self):
        self.assertTrue(np.allclose(dirichlet_grid(3), [0.25, 0.5, 0.75]))

    def test_evaluate_interpolates_between_nodes(self):
        model = fd_laplacian_model(3)
        values = np.array([1.0, 2.0, 3.0])
        self.assertAlmostEqual(model.evaluate(values, 0.5).real, 2.0)
        self.assertAlmostEqual(model.evaluate(values, 0.625).real, 2.5)
        self.assertAlmostEqual(model.evaluate(values, 0.125).real, 0.5)


class TestSolveTridiagonal(unittest.TestCase):

    def test_matches_dense(self):
        rng = np.random.default_rng(5)
        n = 6
        lower = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        upper = rng.standard_normal(n - 1) + 1j * rng.standard_normal(n - 1)
        diag = 4.0 + rng.standard_normal(n) + 1j * rng.standard_normal(n)
        rhs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        dense = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
        self.assertLess(relative(solve_tridiagonal(lower, diag, upper, rhs), np.linalg.solve(dense, rhs)), 1e-12)


class TestGreenFunctionModel(ResolventIdentityMixin, unittest.TestCase):

    xi_span = 1.5

    def make_model(self):
        # grid samples stand for sine polynomials of degree <= n_points
        return green_function_model(256, n_points=5)

    def test_eigenfunction(self):
        model = green_function_model(128, n_points=5)
        v = np.sin(math.pi * model.points)
        for z in contour_points(model, [-2.0, -0.4, 0.0, 1.1, 2.5]):
            expected = v / (z - PI2)
            self.assertLess(relative(model.resolvent_apply(z, v), expected), 1e-8)

    def test_agrees_with_spectral_model_on_modes(self):
        green = green_function_model(128, n_points=9)
        spectral = spectral_mode_model(9)
        coeffs = np.array([1.0, -0.5, 0.25, 0.0, 0.1, 0.0, 0.0, 0.0, 0.0])
        k = np.arange(1, 10)
        samples = np.sin(math.pi * np.outer(green.points, k)) @ coeffs
        z = contour_points(green, [0.8])[0]
        expected_coeffs = spectral.resolvent_apply(z, coeffs)
        expected = np.sin(math.pi * np.outer(green.points, k)) @ expected_coeffs
        self.assertLess(relative(green.resolvent_apply(z, samples), expected), 1e-8)

    def test_callable_matches_samples_on_modes(self):
        model = green_function_model(128, n_points=3)
        z = contour_points(model, [0.3])[0]
        from_callable = model.resolvent_apply(z, lambda s: np.sin(2 * math.pi * s))
        from_samples = model.resolvent_apply(z, np.sin(2 * math.pi * model.points))
        self.assertLess(relative(from_callable, from_samples), 1e-10)

    def test_decay_in_modulus(self):
        model = green_function_model(128, n_points=3)
        v = np.sin(math.pi * model.points)
        norms = [np.max(np.abs(model.resolvent_apply(z, v))) for z in (20.0, 80.0, 320.0)]
        self.assertTrue(norms[0] > norms[1] > norms[2])

    def test_x_log_x_against_fine_difference_grid(self):
        green = green_function_model(128, n_points=1)
        fd = fd_laplacian_model(1999)
        z = contour_points(green, [0.5])[0]
        from_green = green.resolvent_apply(z, x_log_x)[0]
        from_fd = fd.resolvent_apply(z, x_log_x(fd.points))[999]
        self.assertAlmostEqual(fd.points[999], 0.5, places=15)
        self.assertLess(abs(from_green - from_fd), 1e-5)

    def test_sin_zero_is_singular(self):
        model = green_function_model(16, n_points=1)
        with self.assertRaises(SingularResolventError):
            model.resolvent_apply(4 * PI2, np.array([1.0]))

    def test_small_quadrature_rejected(self):
        with self.assertRaises(InvalidConfigError):
            green_function_model(4)

    def test_finite_differences_converge_with_order_two(self):
        green = green_function_model(128, n_points=1)
        z = contour_points(green, [0.5])[0]
        v = lambda s: s * (1.0 - s)
        target = green.resolvent_apply(z, v)[0]
        errors = []
        for n in (31, 63, 127, 255):
            fd = fd_laplacian_model(n)
            mid = (n - 1) // 2
            self.assertAlmostEqual(fd.points[mid], 0.5, places=15)
            errors.append(abs(fd.resolvent_apply(z, v)[mid] - target))
        orders = [math.log2(coarse / fine) for coarse, fine in zip(errors, errors[1:])]
        for order in orders:
            self.assertGreater(order, 1.8)
            self.assertLess(order, 2.2)

    def test_accuracy_warning_when_quadrature_too_coarse(self):
        model = green_function_model(8, n_points=1, check_convergence=True)
        with self.assertLogs("src.operators", level="WARNING") as logs:
            model.resolvent_apply(-1.0e4 + 1.0e4j, lambda s: s * (1.0 - s))
        self.assertIn("relative change", logs.output[0])

    def test_convergence_check_keeps_result(self):
        model = green_function_model(64, n_points=3, check_convergence=True)
        z = contour_points(model, [0.0])[0]
        v = np.sin(math.pi * model.points)
        self.assertLess(relative(model.resolvent_apply(z, v), v / (z - PI2)), 1e-8)


if __name__ == '__main__':
    unittest.main()
