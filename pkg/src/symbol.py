"""
Scalar nonlocal symbol B(z) = 1 + sum alpha_k exp(-z t_k).

B(A) is the operator whose inverse enters the solution; its nonvanishing on the
integration contour is certified by Q = (1 - sum |alpha_k| exp(-rho1 t_k))^(-1).
"""

import logging
from typing import Tuple, Union

import numpy as np

from src.exceptions import ContourUnsafeError
from src.models import NonlocalSpec, SpectralCharacteristics, Verdict

logger = logging.getLogger(__name__)


def check_solvability(nl: NonlocalSpec, spec: SpectralCharacteristics) -> Verdict:
    """UM1 when sum |alpha| < 1, else UM2 when sum |alpha| exp(-rho0 t) < 1, else Unknown"""
    weights = np.abs(nl.alpha_array())
    if weights.sum() < 1.0:
        return Verdict.UM1
    if float(np.sum(weights * np.exp(-spec.rho0 * nl.time_array()))) < 1.0:
        return Verdict.UM2
    return Verdict.UNKNOWN


def symbol_B(nl: NonlocalSpec, z: Union[complex, np.ndarray]) -> Union[complex, np.ndarray]:
    """B(z) = 1 + sum alpha_k exp(-z t_k); accepts a scalar or an array of z"""
    z_arr = np.asarray(z, dtype=complex)
    if nl.m == 0:
        result = np.ones_like(z_arr)
    else:
        with np.errstate(under="ignore"):
            result = 1.0 + np.exp(-np.multiply.outer(z_arr, nl.time_array())) @ nl.alpha_array()
    if np.ndim(z) == 0:
        return complex(result)
    return result


def damped_weights(nl: NonlocalSpec, spec: SpectralCharacteristics) -> np.ndarray:
    """|alpha_k| exp(-rho1 t_k), one entry per nonlocal point"""
    return np.abs(nl.alpha_array()) * np.exp(-spec.rho1 * nl.time_array())


def dominant_point(nl: NonlocalSpec, spec: SpectralCharacteristics) -> Tuple[int, float]:
    """Index and time of the largest damped weight"""
    weights = damped_weights(nl, spec)
    index = int(np.argmax(weights))
    return index, nl.times[index]


def q_bound(nl: NonlocalSpec, spec: SpectralCharacteristics) -> float:
    """Q with |B(z)| >= 1/Q on every contour whose real semi-axis is at least rho1"""
    margin = 1.0 - float(np.sum(damped_weights(nl, spec)))
    if margin <= 0.0:
        index, time = dominant_point(nl, spec)
        raise ContourUnsafeError(
            f"1 - sum |alpha_k| exp(-rho1 t_k) = {margin:.6g} <= 0 for rho1 = {spec.rho1:.6g}; "
            f"t_{index + 1} = {time:.6g} dominates",
            dominant_index=index,
            dominant_time=time,
        )
    return 1.0 / margin
