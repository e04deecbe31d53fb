"""Тесты для контура интегрирования"""
import math
import unittest
import sys
import os

import mpmath
import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.contour import (
    family_axes,
    hyperbola_eval,
    hyperbola_nodes,
    integration_hyperbola,
    strip_height,
    theoretical_rate,
)
from src.exceptions import InvalidCharacteristicsError, OutOfStripError
from src.models import Hyperbola, SpectralCharacteristics


class TestStripHeight(unittest.TestCase):

    def test_zero_shift_gives_complement_angle(self):
        spec = SpectralCharacteristics(rho0=1.0, phi=math.pi / 4, rho1=0.0)
        self.assertAlmostEqual(strip_height(spec), math.pi / 4, places=14)

    def test_sum_with_angle_is_right_angle_for_zero_shift(self):
        spec = SpectralCharacteristics(rho0=1.0, phi=math.pi / 4, rho1=0.0)
        self.assertAlmostEqual(strip_height(spec) + spec.phi, math.pi / 2, places=14)

    def test_matches_extended_precision(self):
        rho0 = math.pi ** 2
        spec = SpectralCharacteristics(rho0=rho0, phi=math.pi / 6, rho1=rho0 / 2)
        mpmath.mp.dps = 40
        r0 = mpmath.pi ** 2
        b0 = r0 * mpmath.tan(mpmath.pi / 6)
        expected = mpmath.acos((r0 / 2) / mpmath.sqrt(r0 ** 2 + b0 ** 2)) - mpmath.pi / 6
        self.assertLess(abs(strip_height(spec) - float(expected)), 1e-14)

    def test_default_shift_is_half_vertex(self):
        spec = SpectralCharacteristics(rho0=4.0, phi=0.3)
        self.assertEqual(spec.rho1, 2.0)

    def test_shift_at_vertex_rejected(self):
        with self.assertRaises(InvalidCharacteristicsError):
            SpectralCharacteristics(rho0=1.0, phi=0.5, rho1=1.0)

    def test_bad_angle_rejected(self):
        with self.assertRaises(InvalidCharacteristicsError):
            SpectralCharacteristics(rho0=1.0, phi=math.pi / 2)
        with self.assertRaises(InvalidCharacteristicsError):
            SpectralCharacteristics(rho0=-1.0, phi=0.5)


class TestIntegrationHyperbola(unittest.TestCase):

    def test_unit_example(self):
        spec = SpectralCharacteristics(rho0=1.0, phi=math.pi / 4, rho1=0.0)
        hyp = integration_hyperbola(spec)
        self.assertAlmostEqual(hyp.a, math.sqrt(2) * math.cos(3 * math.pi / 8), places=14)
        self.assertAlmostEqual(hyp.b, math.sqrt(2) * math.sin(3 * math.pi / 8), places=14)
        self.assertAlmostEqual(hyp.a, 0.5412, places=4)
        self.assertAlmostEqual(hyp.b, 1.3066, places=4)

    def test_axes_lie_on_radius(self):
        for phi, rho1 in [(0.3, 0.1), (math.pi / 6, 4.0), (1.2, 0.0)]:
            spec = SpectralCharacteristics(rho0=9.0, phi=phi, rho1=rho1)
            hyp = integration_hyperbola(spec)
            self.assertAlmostEqual(hyp.a ** 2 + hyp.b ** 2, spec.rho0 ** 2 + spec.b0 ** 2, places=10)

    def test_real_axis_between_shift_and_vertex(self):
        spec = SpectralCharacteristics(rho0=9.0, phi=math.pi / 6, rho1=4.5)
        hyp = integration_hyperbola(spec)
        self.assertGreaterEqual(hyp.a, spec.rho1)
        self.assertLessEqual(hyp.a, spec.rho0)


class TestFamilyAxes(unittest.TestCase):

    def setUp(self):
        self.spec = SpectralCharacteristics(rho0=math.pi ** 2, phi=math.pi / 6)
        self.half = strip_height(self.spec) / 2

    def test_center_is_integration_hyperbola(self):
        hyp = integration_hyperbola(self.spec)
        a, b = family_axes(self.spec, 0.0)
        self.assertAlmostEqual(a, hyp.a, places=12)
        self.assertAlmostEqual(b, hyp.b, places=12)

    def test_upper_edge_is_spectral_hyperbola(self):
        a, b = family_axes(self.spec, self.half)
        self.assertLess(abs(a - self.spec.rho0) / self.spec.rho0, 1e-12)
        self.assertLess(abs(b - self.spec.b0) / self.spec.b0, 1e-12)

    def test_lower_edge_passes_through_shift(self):
        a, _ = family_axes(self.spec, -self.half)
        self.assertLess(abs(a - self.spec.rho1) / self.spec.rho1, 1e-12)

    def test_monotone_in_shift(self):
        nus = np.linspace(-self.half, self.half, 11)
        axes = [family_axes(self.spec, nu) for nu in nus]
        a_values = [a for a, _ in axes]
        b_values = [b for _, b in axes]
        self.assertTrue(all(x < y for x, y in zip(a_values, a_values[1:])))
        self.assertTrue(all(x > y for x, y in zip(b_values, b_values[1:])))

    def test_outside_strip_rejected(self):
        with self.assertRaises(OutOfStripError):
            family_axes(self.spec, 1.01 * self.half)


class TestHyperbolaEval(unittest.TestCase):

    def test_vertex(self):
        z, dz = hyperbola_eval(Hyperbola(a=0.5412, b=1.3066), 0.0)
        self.assertEqual(z, complex(0.5412, 0.0))
        self.assertEqual(dz, complex(0.0, -1.3066))

    def test_point_at_one(self):
        z, dz = hyperbola_eval(Hyperbola(a=0.5412, b=1.3066), 1.0)
        self.assertAlmostEqual(z.real, 0.5412 * math.cosh(1.0), places=12)
        self.assertAlmostEqual(z.imag, -1.3066 * math.sinh(1.0), places=12)
        self.assertAlmostEqual(z.real, 0.8351, places=3)
        self.assertAlmostEqual(dz.imag, -1.3066 * math.cosh(1.0), places=12)

    def test_real_part_bounded_below(self):
        hyp = Hyperbola(a=2.0, b=3.0)
        for xi in np.linspace(-5, 5, 21):
            z, _ = hyperbola_eval(hyp, float(xi))
            self.assertGreaterEqual(z.real, hyp.a)

    def test_nodes_are_conjugate_symmetric_bitwise(self):
        xi, z, dz = hyperbola_nodes(Hyperbola(a=7.1, b=11.9), 40, 0.37)
        self.assertEqual(len(xi), 81)
        self.assertTrue(np.array_equal(z[::-1], np.conj(z)))
        self.assertTrue(np.array_equal(dz[::-1], -np.conj(dz)))
        self.assertTrue(np.array_equal(xi[::-1], -xi))

    def test_nodes_overflow_is_not_finite(self):
        _, z, _ = hyperbola_nodes(Hyperbola(a=1.0, b=1.0), 10, 100.0)
        self.assertFalse(np.all(np.isfinite(z)))
        self.assertTrue(np.isfinite(z[10]))


class TestTheoreticalRate(unittest.TestCase):

    def test_formula(self):
        spec = SpectralCharacteristics(rho0=1.0, phi=math.pi / 4, rho1=0.0)
        self.assertAlmostEqual(theoretical_rate(spec, 0.5), math.sqrt(math.pi * (math.pi / 4) * 0.5 / 2), places=14)


if __name__ == '__main__':
    unittest.main()
