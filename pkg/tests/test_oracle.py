"""Тесты для эталонных решений (expm)"""
import math
import unittest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.exceptions import InvalidConfigError
from src.models import NonlocalSpec
from src.operators import fd_laplacian_model
from src.oracle import expm_oracle, nonlocal_reference, particular_reference, variation_integral


class TestExpmOracle(unittest.TestCase):

    def test_zero_operator_is_identity(self):
        v = np.array([1.0, -2.0, 3.0])
        self.assertTrue(np.allclose(expm_oracle(np.zeros((3, 3)), 0.7, v), v, rtol=0, atol=1e-15))

    def test_scalar(self):
        result = expm_oracle(np.array([[8.0]]), 0.3, np.array([2.0]))
        self.assertAlmostEqual(result[0], 2.0 * math.exp(-2.4), places=14)

    def test_semigroup_property(self):
        A = fd_laplacian_model(8).dense_matrix()
        v = np.linspace(1.0, 2.0, 8)
        once = expm_oracle(A, 0.5, v)
        twice = expm_oracle(A, 0.2, expm_oracle(A, 0.3, v))
        self.assertLess(np.max(np.abs(once - twice)) / np.max(np.abs(once)), 1e-10)

    def test_dimension_limit(self):
        with self.assertRaises(InvalidConfigError):
            expm_oracle(np.eye(65), 0.1, np.ones(65))


class TestVariationIntegral(unittest.TestCase):

    def test_scalar_closed_form(self):
        lam = 3.0
        t = 0.8
        result = variation_integral(np.array([[lam]]), lambda s: np.array([math.exp(s)]), t)
        expected = (math.exp(t) - math.exp(-lam * t)) / (1.0 + lam)
        self.assertAlmostEqual(result[0].real, expected, places=12)

    def test_zero_length(self):
        result = variation_integral(np.eye(2), lambda s: np.ones(2), 0.0)
        self.assertTrue(np.array_equal(result, np.zeros(2)))


class TestNonlocalReference(unittest.TestCase):

    def test_local_problem_reduces_to_expm(self):
        A = fd_laplacian_model(4).dense_matrix()
        u0 = np.array([1.0, 0.5, -0.5, 2.0])
        result = nonlocal_reference(A, NonlocalSpec(), u0, None, 0.3)
        self.assertTrue(np.allclose(result, expm_oracle(A, 0.3, u0), rtol=1e-13, atol=1e-15))

    def test_scalar_homogeneous(self):
        lam = 2.0
        nl = NonlocalSpec(alphas=(0.5,), times=(0.2,))
        result = nonlocal_reference(np.array([[lam]]), nl, np.array([1.0]), None, 0.7)
        expected = math.exp(-0.7 * lam) / (1.0 + 0.5 * math.exp(-0.2 * lam))
        self.assertAlmostEqual(result[0].real, expected, places=13)

    def test_satisfies_nonlocal_condition(self):
        A = fd_laplacian_model(8).dense_matrix()
        nl = NonlocalSpec(alphas=(0.5, 0.3), times=(0.2, 0.4))
        w = np.sin(math.pi * np.arange(1, 9) / 9.0)
        u0 = 1.0 + w
        f = lambda s: math.exp(-s) * w
        residual = nonlocal_reference(A, nl, u0, f, 0.0)
        for alpha, t_k in zip(nl.alphas, nl.times):
            residual = residual + alpha * nonlocal_reference(A, nl, u0, f, t_k)
        self.assertLess(np.max(np.abs(residual - u0)), 1e-10)

    def test_particular_part_is_zero_without_source(self):
        A = fd_laplacian_model(3).dense_matrix()
        nl = NonlocalSpec(alphas=(0.5,), times=(0.2,))
        result = particular_reference(A, nl, lambda s: np.zeros(3), 0.4)
        self.assertTrue(np.allclose(result, 0.0, atol=1e-15))


if __name__ == '__main__':
    unittest.main()
