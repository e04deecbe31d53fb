"""
Dense reference solutions for small operators.

Matrix exponentials come from scipy.linalg.expm (scaling and squaring with Pade),
variation-of-constants integrals from scipy.integrate.quad_vec. Only meant for
desk-scale checks of the contour solvers.
"""

import logging
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy import linalg as sp_linalg

from src.exceptions import InvalidConfigError, OracleFailure
from src.models import NonlocalSpec

logger = logging.getLogger(__name__)

MAX_ORACLE_DIM = 64
QUAD_EPSREL = 1e-12
QUAD_EPSABS = 1e-13

SourceFn = Callable[[float], np.ndarray]


def _check_matrix(A: np.ndarray) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A))
    if A.shape[0] != A.shape[1]:
        raise InvalidConfigError(f"oracle needs a square matrix, got shape {A.shape}")
    if A.shape[0] > MAX_ORACLE_DIM:
        raise InvalidConfigError(f"oracle limited to dimension {MAX_ORACLE_DIM}, got {A.shape[0]}")
    return A


def semigroup(A: np.ndarray, t: float) -> np.ndarray:
    """e^(-tA) as a dense matrix"""
    return sp_linalg.expm(-t * _check_matrix(A))


def expm_oracle(A: np.ndarray, t: float, v: np.ndarray) -> np.ndarray:
    """e^(-tA) v"""
    return semigroup(A, t) @ np.asarray(v)


def variation_integral(A: np.ndarray, f: SourceFn, t: float) -> np.ndarray:
    """int_0^t e^(-A(t - s)) f(s) ds by adaptive vector quadrature"""
    A = _check_matrix(A)
    n = A.shape[0]
    if t == 0.0:
        return np.zeros(n, dtype=complex)

    def integrand(s: float) -> np.ndarray:
        value = sp_linalg.expm(-(t - s) * A) @ np.asarray(f(s), dtype=complex)
        return np.concatenate([value.real, value.imag])

    result, err, info = integrate.quad_vec(integrand, 0.0, t, epsabs=QUAD_EPSABS,
                                           epsrel=QUAD_EPSREL, full_output=True)
    if not info.success:
        raise OracleFailure(f"variation integral on [0, {t}] did not converge: {getattr(info, 'message', info.status)} (err {err:.3e})")
    return result[:n] + 1j * result[n:]


def nonlocal_reference(A: np.ndarray, nl: NonlocalSpec, u0: np.ndarray,
                       f: Optional[SourceFn], t: float) -> np.ndarray:
    """
    Solution of u' + Au = f, u(0) + sum alpha_i u(t_i) = u0, evaluated at t.

    With B = I + sum alpha_i e^(-A t_i) and I_i the variation integral up to t_i,
    W solves B W = B u0 - u0 + sum alpha_i I_i and u(0) = u0 - W.
    """
    A = _check_matrix(A)
    n = A.shape[0]
    u0 = np.asarray(u0, dtype=complex).reshape(n)
    B = np.eye(n, dtype=complex)
    forcing = np.zeros(n, dtype=complex)
    for alpha, t_i in zip(nl.alphas, nl.times):
        B += alpha * semigroup(A, t_i)
        if f is not None:
            forcing += alpha * variation_integral(A, f, t_i)
    try:
        W = sp_linalg.solve(B, B @ u0 - u0 + forcing)
    except sp_linalg.LinAlgError as e:
        raise OracleFailure(f"nonlocal system B W = r is singular: {e}")
    start = u0 - W
    value = semigroup(A, t) @ start
    if f is not None:
        value = value + variation_integral(A, f, t)
    return value


def particular_reference(A: np.ndarray, nl: NonlocalSpec, f: SourceFn, t: float) -> np.ndarray:
    """Particular solution: the nonlocal problem with u0 = 0"""
    n = _check_matrix(A).shape[0]
    return nonlocal_reference(A, nl, np.zeros(n), f, t)
