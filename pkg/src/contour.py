"""
Integration contour construction.

The spectrum of A lies in the sector with vertex rho0 and half-angle phi. The spectral
hyperbola passes through (rho0, 0) with asymptotes parallel to the sector rays; the
integration hyperbola sits inside the resolvent set so that every shift z(xi + i nu),
|nu| < d1/2, stays between the line Re z = rho1 and the spectral hyperbola.
"""

import logging
import math
from typing import Tuple

import numpy as np

from src.exceptions import InvalidCharacteristicsError, OutOfStripError
from src.models import Hyperbola, SpectralCharacteristics

logger = logging.getLogger(__name__)

ARCCOS_SLACK = 1e-15


def _clamped_arccos(value: float) -> float:
    if value > 1.0 + ARCCOS_SLACK or value < -1.0 - ARCCOS_SLACK:
        raise InvalidCharacteristicsError(f"arccos argument {value!r} outside [-1, 1]")
    return math.acos(min(1.0, max(-1.0, value)))


def strip_height(spec: SpectralCharacteristics) -> float:
    """d1 = arccos(rho1 / sqrt(rho0^2 + b0^2)) - phi"""
    spec.validate()
    d1 = _clamped_arccos(spec.rho1 / spec.radius) - spec.phi
    if not d1 > 0.0:
        raise InvalidCharacteristicsError(f"strip height collapsed to {d1!r}")
    return d1


def _center_angle(spec: SpectralCharacteristics) -> float:
    return 0.5 * strip_height(spec) + spec.phi


def integration_hyperbola(spec: SpectralCharacteristics) -> Hyperbola:
    """Axes a_I = r cos(d1/2 + phi), b_I = r sin(d1/2 + phi) with r = sqrt(rho0^2 + b0^2)"""
    theta = _center_angle(spec)
    r = spec.radius
    return Hyperbola(a=r * math.cos(theta), b=r * math.sin(theta))


def family_axes(spec: SpectralCharacteristics, nu: float) -> Tuple[float, float]:
    """Axes (a(nu), b(nu)) of the contour shifted by i*nu"""
    half = 0.5 * strip_height(spec)
    if abs(nu) > half * (1.0 + 1e-14):
        raise OutOfStripError(f"|nu| = {abs(nu)!r} exceeds d1/2 = {half!r}")
    angle = half + spec.phi - nu
    r = spec.radius
    return r * math.cos(angle), r * math.sin(angle)


def hyperbola_eval(h: Hyperbola, xi: float) -> Tuple[complex, complex]:
    """(z(xi), z'(xi)); overflow at large |xi| yields inf and is left to the caller"""
    with np.errstate(over="ignore"):
        c = float(np.cosh(xi))
        s = float(np.sinh(xi))
    return complex(h.a * c, -h.b * s), complex(h.a * s, -h.b * c)


def hyperbola_nodes(h: Hyperbola, n: int, step: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Nodes xi_k = k*step for k = -n..n with z and z' at each one.

    cosh/sinh are evaluated once for k >= 0 and mirrored, so
    z(-xi) == conj(z(xi)) and z'(-xi) == -conj(z'(xi)) hold bitwise.
    """
    k = np.arange(n + 1, dtype=float)
    xi_pos = k * step
    with np.errstate(over="ignore", invalid="ignore"):
        c = np.cosh(xi_pos)
        s = np.sinh(xi_pos)
        z_pos = h.a * c - 1j * h.b * s
        dz_pos = h.a * s - 1j * h.b * c
    xi = np.concatenate([-xi_pos[:0:-1], xi_pos])
    z = np.concatenate([np.conj(z_pos[:0:-1]), z_pos])
    dz = np.concatenate([-np.conj(dz_pos[:0:-1]), dz_pos])
    return xi, z, dz


def theoretical_rate(spec: SpectralCharacteristics, alpha: float) -> float:
    """Exponent sqrt(pi d1 alpha / 2) of the uniform-in-t error law, per sqrt(N+1)"""
    return math.sqrt(math.pi * strip_height(spec) * alpha / 2.0)
