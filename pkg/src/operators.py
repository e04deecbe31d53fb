"""
Operator models: the resolvent action v -> (zI - A)^(-1) v for A = -d^2/dx^2 on (0, 1)
with Dirichlet conditions, in three representations, plus a 1x1 model.

Models are immutable after construction and keep no scratch state between calls,
so resolvent_apply may be evaluated for many contour nodes concurrently.
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, Optional, Union

import numpy as np
from scipy import fft as sp_fft
from scipy import linalg as sp_linalg
from scipy.special import expit

from src.config import config
from src.exceptions import InvalidConfigError, SingularResolventError
from src.models import SpectralCharacteristics

logger = logging.getLogger(__name__)

VectorLike = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]

SINGULAR_TOL = 1e-14


def dirichlet_grid(n: int) -> np.ndarray:
    """Interior points x_j = j/(n+1), j = 1..n"""
    return np.arange(1, n + 1, dtype=float) / (n + 1)


def fd_min_eigenvalue(n: int) -> float:
    """Smallest eigenvalue 4(n+1)^2 sin^2(pi/(2(n+1))) of the scaled tridiag(-1, 2, -1)"""
    return 4.0 * (n + 1) ** 2 * math.sin(math.pi / (2 * (n + 1))) ** 2


def _characteristics(lambda_min: float, phi: Optional[float], margin: Optional[float],
                     rho1: Optional[float], M: float) -> SpectralCharacteristics:
    phi = config.default_phi if phi is None else phi
    margin = config.resolvent_margin if margin is None else margin
    return SpectralCharacteristics(rho0=lambda_min * (1.0 - margin), phi=phi, M=M, rho1=rho1)


def solve_tridiagonal(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray,
                      rhs: np.ndarray) -> np.ndarray:
    """
    Solve a complex tridiagonal system by banded LU with partial pivoting.

    lower[i] multiplies x[i] in row i+1, upper[i] multiplies x[i+1] in row i.
    """
    n = diag.shape[0]
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    try:
        return sp_linalg.solve_banded((1, 1), ab, np.asarray(rhs, dtype=complex), check_finite=True)
    except (np.linalg.LinAlgError, sp_linalg.LinAlgError) as e:
        raise SingularResolventError(f"zero pivot in tridiagonal solve: {e}")


class OperatorModel(ABC):
    """Contract: dimension, spectral characteristics and resolvent action"""

    dim: int
    spec: SpectralCharacteristics
    is_real: bool = True

    @abstractmethod
    def resolvent_apply(self, z: complex, v: VectorLike) -> np.ndarray:
        """(zI - A)^(-1) v"""

    def as_vector(self, v: VectorLike) -> np.ndarray:
        """Coordinates of v in the model's space"""
        if callable(v):
            raise InvalidConfigError(f"{type(self).__name__} needs explicit vectors, not functions")
        vec = np.asarray(v, dtype=complex).reshape(-1)
        if vec.shape[0] != self.dim:
            raise InvalidConfigError(f"vector of length {vec.shape[0]} for a model of dimension {self.dim}")
        return vec

    def evaluate(self, v: np.ndarray, x: float) -> complex:
        """Point value of the function represented by v"""
        raise NotImplementedError

    def dense_matrix(self) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no dense representation")


class ScalarModel(OperatorModel):
    """A = lambda acting on C^1"""

    def __init__(self, lam: float, spec: SpectralCharacteristics):
        self.lam = float(lam)
        self.dim = 1
        self.spec = spec

    def resolvent_apply(self, z: complex, v: VectorLike) -> np.ndarray:
        shift = z - self.lam
        if abs(shift) <= SINGULAR_TOL * max(1.0, abs(self.lam)):
            raise SingularResolventError(f"z = {z} is the eigenvalue {self.lam}")
        return self.as_vector(v) / shift

    def evaluate(self, v: np.ndarray, x: float) -> complex:
        return complex(np.asarray(v).reshape(-1)[0])

    def dense_matrix(self) -> np.ndarray:
        return np.array([[self.lam]])


class SpectralModeModel(OperatorModel):
    """Diagonal action on sine-series coefficients: c_k -> c_k / (z - (k pi)^2)"""

    def __init__(self, n_modes: int, phi: Optional[float] = None, margin: Optional[float] = None,
                 rho1: Optional[float] = None, M: float = 1.0):
        if n_modes < 1:
            raise InvalidConfigError(f"n_modes must be >= 1, got {n_modes}")
        self.dim = n_modes
        self.eigenvalues = (np.arange(1, n_modes + 1, dtype=float) * math.pi) ** 2
        self.spec = _characteristics(self.eigenvalues[0], phi, margin, rho1, M)

    def resolvent_apply(self, z: complex, v: VectorLike) -> np.ndarray:
        shift = z - self.eigenvalues
        if np.any(np.abs(shift) <= SINGULAR_TOL * self.eigenvalues):
            raise SingularResolventError(f"z = {z} coincides with an eigenvalue (k pi)^2")
        return self.as_vector(v) / shift

    def mode_vector(self, k: int, scale: float = 1.0) -> np.ndarray:
        vec = np.zeros(self.dim)
        vec[k - 1] = scale
        return vec

    def evaluate(self, v: np.ndarray, x: float) -> complex:
        k = np.arange(1, self.dim + 1, dtype=float)
        return complex(np.sin(k * math.pi * x) @ np.asarray(v))

    def dense_matrix(self) -> np.ndarray:
        return np.diag(self.eigenvalues)


class GridModel(OperatorModel):
    """Shared handling of vectors sampled on the Dirichlet grid"""

    points: np.ndarray

    def as_vector(self, v: VectorLike) -> np.ndarray:
        if callable(v):
            return np.asarray(v(self.points), dtype=complex)
        return super().as_vector(v)

    def evaluate(self, v: np.ndarray, x: float) -> complex:
        values = np.asarray(v).reshape(-1)
        hits = np.flatnonzero(np.isclose(self.points, x, rtol=0.0, atol=1e-12))
        if hits.size:
            return complex(values[hits[0]])
        grid = np.concatenate([[0.0], self.points, [1.0]])
        padded = np.concatenate([[0.0], values, [0.0]])
        return complex(np.interp(x, grid, padded.real) + 1j * np.interp(x, grid, padded.imag))


class FDLaplacianModel(GridModel):
    """A = (n+1)^2 tridiag(-1, 2, -1) on the interior grid"""

    def __init__(self, n: int, phi: Optional[float] = None, margin: Optional[float] = None,
                 rho1: Optional[float] = None, M: float = 1.0):
        if n < 1:
            raise InvalidConfigError(f"n must be >= 1, got {n}")
        self.dim = n
        self.points = dirichlet_grid(n)
        self.scale = float((n + 1) ** 2)
        self.spec = _characteristics(fd_min_eigenvalue(n), phi, margin, rho1, M)

    def resolvent_apply(self, z: complex, v: VectorLike) -> np.ndarray:
        rhs = self.as_vector(v)
        off = np.full(self.dim - 1, self.scale, dtype=complex)
        diag = np.full(self.dim, z - 2.0 * self.scale, dtype=complex)
        return solve_tridiagonal(off, diag, off, rhs)

    def dense_matrix(self) -> np.ndarray:
        n = self.dim
        return self.scale * (2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1))


class GreenFunctionModel(GridModel):
    """
    Resolvent of -d^2/dx^2 through its Green function

        G(x, s) = -sin(x w) sin((1-s) w) / (w sin w),  x <= s,  w = sqrt(z)

    integrated by a tanh-mapped Sinc rule on [0, x] and [x, 1] separately (G has a
    kink at s = x). Array inputs are sine polynomials sampled on the grid and are
    interpolated by the discrete sine transform; callables are integrated directly.
    """

    ACCURACY_TOL = 1e-8

    def __init__(self, n_quad: int = 128, n_points: int = 1, phi: Optional[float] = None,
                 margin: Optional[float] = None, rho1: Optional[float] = None, M: float = 1.0,
                 check_convergence: bool = False):
        if n_quad < 8:
            raise InvalidConfigError(f"n_quad must be >= 8, got {n_quad}")
        if n_points < 1:
            raise InvalidConfigError(f"n_points must be >= 1, got {n_points}")
        self.n_quad = n_quad
        self.dim = n_points
        self.points = dirichlet_grid(n_points)
        self.check_convergence = check_convergence
        self.spec = _characteristics(math.pi ** 2, phi, margin, rho1, M)
        self._rules = {n_quad: self._build_rule(n_quad)}
        if check_convergence:
            self._rules[2 * n_quad] = self._build_rule(2 * n_quad)

    def _build_rule(self, n_quad: int):
        """Per grid point: nodes, weights and distances for both halves"""
        step = math.pi / (2.0 * math.sqrt(n_quad))
        eta = np.arange(-n_quad, n_quad + 1, dtype=float) * step
        up = expit(2.0 * eta)            # (1 + tanh)/2
        down = expit(-2.0 * eta)         # (1 - tanh)/2
        jac = 2.0 * up * down * step     # sech^2(eta)/2 times the Sinc step
        rule = []
        for x in self.points:
            left_s = x * up
            right_s = x + (1.0 - x) * up
            rule.append({
                "left_s": left_s, "left_gap": x * down, "left_w": x * jac,
                "right_s": right_s, "right_gap": (1.0 - x) * up,
                "right_tail": (1.0 - x) * down, "right_w": (1.0 - x) * jac,
            })
        return rule

    @staticmethod
    def _sqrt_lower(z: complex) -> complex:
        w = complex(np.sqrt(complex(z)))
        return -w if w.imag > 0.0 else w

    def _sampler(self, v: VectorLike) -> Callable[[np.ndarray], np.ndarray]:
        if callable(v):
            return lambda s: np.asarray(v(s), dtype=complex)
        values = super().as_vector(v)
        n = self.dim
        coeffs = (sp_fft.dst(values.real, type=1) + 1j * sp_fft.dst(values.imag, type=1)) / (n + 1)
        k = np.arange(1, n + 1, dtype=float) * math.pi
        return lambda s: np.sin(np.multiply.outer(s, k)) @ coeffs

    def _apply_rule(self, rule, z: complex, sampler) -> np.ndarray:
        w = self._sqrt_lower(z)
        out = np.empty(self.dim, dtype=complex)
        if abs(w) < 1e-8:
            for i, (x, r) in enumerate(zip(self.points, rule)):
                left = -(1.0 - x) * r["left_s"]
                right = -x * r["right_tail"]
                out[i] = (r["left_w"] * left) @ sampler(r["left_s"]) + (r["right_w"] * right) @ sampler(r["right_s"])
            return out
        denom = 1.0 - np.exp(-2j * w)
        if abs(denom) < SINGULAR_TOL:
            raise SingularResolventError(f"sin(sqrt(z)) = 0 at z = {z}")
        scale = -1.0 / (2j * w * denom)
        for i, (x, r) in enumerate(zip(self.points, rule)):
            # x >= s: sin(s w) sin((1-x) w); x <= s: sin(x w) sin((1-s) w), both in decaying form
            left = np.exp(-1j * r["left_gap"] * w) * (1.0 - np.exp(-2j * r["left_s"] * w)) \
                * (1.0 - np.exp(-2j * (1.0 - x) * w))
            right = np.exp(-1j * r["right_gap"] * w) * (1.0 - np.exp(-2j * x * w)) \
                * (1.0 - np.exp(-2j * r["right_tail"] * w))
            out[i] = scale * ((r["left_w"] * left) @ sampler(r["left_s"])
                              + (r["right_w"] * right) @ sampler(r["right_s"]))
        return out

    def resolvent_apply(self, z: complex, v: VectorLike) -> np.ndarray:
        sampler = self._sampler(v)
        result = self._apply_rule(self._rules[self.n_quad], z, sampler)
        if self.check_convergence:
            refined = self._apply_rule(self._rules[2 * self.n_quad], z, sampler)
            change = np.max(np.abs(refined - result)) / max(np.max(np.abs(refined)), 1e-300)
            if change > self.ACCURACY_TOL:
                logger.warning(f"Green quadrature at z={z:.6g}: relative change {change:.3e} "
                               f"between {self.n_quad} and {2 * self.n_quad} nodes")
        return result


def spectral_mode_model(n_modes: int, **kwargs) -> SpectralModeModel:
    return SpectralModeModel(n_modes, **kwargs)


def green_function_model(n_quad: int, **kwargs) -> GreenFunctionModel:
    return GreenFunctionModel(n_quad, **kwargs)


def fd_laplacian_model(n: int, **kwargs) -> FDLaplacianModel:
    return FDLaplacianModel(n, **kwargs)


def scalar_model(lam: float, spec: SpectralCharacteristics) -> ScalarModel:
    return ScalarModel(lam, spec)
