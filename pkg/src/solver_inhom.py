"""
Quadratures for the particular solution u_ih(t) = u_1(t) - sum_j alpha_j u_2,j(t).

u_1 is the variation-of-constants integral, u_2,j carries B(A)^(-1) e^(-At) applied to
the history integral up to the nonlocal point t_j. Time integrals on [0, t] use the
map s = (t/2)(1 + tanh(xi)) and the Sinc rule with the same N and h as the contour
unless an inner N/h is given.
"""

import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.special import expit

from src.exceptions import InvalidConfigError
from src.models import NonlocalSpec, SourceTerm
from src.node_pool import NodePool, run_ordered
from src.operators import OperatorModel, VectorLike
from src.solver_hom import (
    SincPlan,
    active_nodes,
    contour_sum,
    ensure_solvable,
    finish_real,
    solve_homogeneous,
)
from src.symbol import q_bound

logger = logging.getLogger(__name__)

InnerFn = Callable[[complex, float], np.ndarray]


def mu_weight(z, t: float, p, h: float):
    """
    (t/2) exp(-(t/2) z (1 - tanh(ph))) / cosh^2(ph), with 1 - tanh and sech^2
    written through expit so the tails stay accurate.
    """
    x = np.asarray(p, dtype=float) * h
    up = expit(2.0 * x)
    down = expit(-2.0 * x)
    with np.errstate(under="ignore"):
        return 2.0 * t * up * down * np.exp(-t * np.asarray(z) * down)


def omega_node(t: float, p, h: float):
    """omega_p(t) = (t/2)(1 + tanh(ph))"""
    return t * expit(2.0 * np.asarray(p, dtype=float) * h)


def _inner_samples(f: SourceTerm, t: float, N: int, h: float) -> np.ndarray:
    p = np.arange(-N, N + 1)
    return f.sample(omega_node(t, p, h))


def _inner_from_samples(z: complex, t: float, samples: np.ndarray, N: int, h: float) -> np.ndarray:
    p = np.arange(-N, N + 1)
    return h * (mu_weight(z, t, p, h) @ samples)


def f_inner_quadrature(z: complex, t_j: float, f: SourceTerm, N: int, h: float) -> np.ndarray:
    """f_k,j = int_0^t_j e^(-z (t_j - s)) f(s) ds by the tanh-mapped Sinc rule"""
    if t_j < 0.0:
        raise InvalidConfigError(f"t_j must be >= 0, got {t_j}")
    if t_j == 0.0:
        return np.zeros_like(np.asarray(f.eval(0.0), dtype=complex))
    return _inner_from_samples(z, t_j, _inner_samples(f, t_j, N, h), N, h)


def closed_form_inner_constant(z: complex, t_j: float, w: np.ndarray) -> np.ndarray:
    """int_0^t_j e^(-z (t_j - s)) w ds"""
    return np.asarray(w) * (-np.expm1(-z * t_j) / z)


def closed_form_inner_exp(z: complex, t_j: float, w: np.ndarray) -> np.ndarray:
    """int_0^t_j e^(-z (t_j - s)) e^s w ds"""
    return np.asarray(w) * (np.exp(t_j) - np.exp(-z * t_j)) / (1.0 + z)


def _inner_settings(plan: SincPlan, n_inner: Optional[int], h_inner: Optional[float]) -> Tuple[int, float]:
    N = plan.N if n_inner is None else int(n_inner)
    if N < 1:
        raise InvalidConfigError(f"n_inner must be >= 1, got {N}")
    if h_inner is None:
        h_inner = plan.h if n_inner is None else plan.h * math.sqrt(plan.N / N)
    return N, h_inner


def _is_real_source(samples: List[np.ndarray]) -> bool:
    return all(not np.any(np.imag(s)) for s in samples)


def solve_u1(plan: SincPlan, model: OperatorModel, f: Optional[SourceTerm], t: float,
             pool: Optional[NodePool] = None, modified: bool = True,
             n_inner: Optional[int] = None, h_inner: Optional[float] = None,
             keep_imag: bool = False) -> np.ndarray:
    """
    u_1,N(t) = (h / 2 pi i) sum_k z'_k [(z_k I - A)^(-1) - I/z_k] f_k(t),
    f_k(t) = int_0^t e^(-z_k (t - s)) f(s) ds by the inner rule
    """
    if t < 0.0:
        raise InvalidConfigError(f"t must be >= 0, got {t}")
    if f is None or t == 0.0:
        return np.zeros(model.dim)
    N_in, h_in = _inner_settings(plan, n_inner, h_inner)
    samples = _inner_samples(f, t, N_in, h_in)
    indices = np.flatnonzero(active_nodes(plan, 0.0))

    def node_term(i: int) -> np.ndarray:
        z = complex(plan.z[i])
        g = _inner_from_samples(z, t, samples, N_in, h_in)
        resolved = model.resolvent_apply(z, g)
        if modified:
            resolved = resolved - g / z
        return plan.dz[i] * resolved

    values = run_ordered(node_term, indices, pool)
    terms: List[Optional[np.ndarray]] = [None] * (2 * plan.N + 1)
    for i, value in zip(indices, values):
        terms[i] = value
    result = contour_sum(plan, terms, model.dim)
    if keep_imag:
        return result
    return finish_real(result, model.is_real and _is_real_source([samples]), "u1 solve")


def _u2_sum(plan: SincPlan, model: OperatorModel, nl: NonlocalSpec, f: SourceTerm, t: float,
            weights: np.ndarray, pool: Optional[NodePool], inner: Optional[InnerFn],
            n_inner: Optional[int], h_inner: Optional[float], modified: bool,
            keep_imag: bool = False) -> np.ndarray:
    """(h / 2 pi i) sum_k e^(-z_k t) z'_k B(z_k)^(-1) [R(z_k) - I/z_k] sum_j weights_j f_k,j"""
    N_in, h_in = _inner_settings(plan, n_inner, h_inner)
    times = [(j, t_j) for j, t_j in enumerate(nl.times) if weights[j] != 0.0]
    samples = {j: _inner_samples(f, t_j, N_in, h_in) for j, t_j in times} if inner is None else {}
    B = plan.symbol_values(nl)
    indices = np.flatnonzero(active_nodes(plan, t))

    def node_term(i: int) -> np.ndarray:
        z = complex(plan.z[i])
        g = np.zeros(model.dim, dtype=complex)
        for j, t_j in times:
            if inner is not None:
                f_kj = np.asarray(inner(z, t_j), dtype=complex)
            else:
                f_kj = _inner_from_samples(z, t_j, samples[j], N_in, h_in)
            g = g + weights[j] * f_kj
        resolved = model.resolvent_apply(z, g)
        if modified:
            resolved = resolved - g / z
        return np.exp(-z * t) * plan.dz[i] / B[i] * resolved

    values = run_ordered(node_term, indices, pool)
    terms: List[Optional[np.ndarray]] = [None] * (2 * plan.N + 1)
    for i, value in zip(indices, values):
        terms[i] = value
    result = contour_sum(plan, terms, model.dim)
    if keep_imag:
        return result
    real = model.is_real and inner is None and _is_real_source(list(samples.values()))
    return finish_real(result, real, "u2 solve")


def solve_u2(plan: SincPlan, model: OperatorModel, nl: NonlocalSpec, f: Optional[SourceTerm], t: float,
             pool: Optional[NodePool] = None, inner: Optional[InnerFn] = None,
             n_inner: Optional[int] = None, h_inner: Optional[float] = None,
             modified: bool = True, keep_imag: bool = False) -> np.ndarray:
    """
    sum_j alpha_j u_2,j,N(t). The particular solution is u_1 minus this sum.

    inner replaces the Sinc rule for f_k,j = int_0^t_j e^(-z_k (t_j - s)) f(s) ds, e.g. by a
    closed form, which leaves only the contour error.
    """
    if t < 0.0:
        raise InvalidConfigError(f"t must be >= 0, got {t}")
    if f is None or nl.m == 0:
        return np.zeros(model.dim)
    q_bound(nl, plan.spec)
    return _u2_sum(plan, model, nl, f, t, nl.alpha_array(), pool, inner, n_inner, h_inner, modified,
                   keep_imag)


def solve_u2_term(plan: SincPlan, model: OperatorModel, nl: NonlocalSpec, f: Optional[SourceTerm],
                  t: float, j: int, pool: Optional[NodePool] = None, inner: Optional[InnerFn] = None,
                  n_inner: Optional[int] = None, h_inner: Optional[float] = None) -> np.ndarray:
    """u_2,j,N(t) for the single nonlocal point t_j (j is 0-based), without the alpha_j factor"""
    if not 0 <= j < nl.m:
        raise InvalidConfigError(f"nonlocal index {j} outside 0..{nl.m - 1}")
    if f is None:
        return np.zeros(model.dim)
    q_bound(nl, plan.spec)
    weights = np.zeros(nl.m)
    weights[j] = 1.0
    return _u2_sum(plan, model, nl, f, t, weights, pool, inner, n_inner, h_inner, True)


def solve_full(plan: SincPlan, model: OperatorModel, nl: NonlocalSpec, u0: VectorLike,
               f: Optional[SourceTerm], t: float, pool: Optional[NodePool] = None,
               force: bool = False, n_inner: Optional[int] = None,
               h_inner: Optional[float] = None) -> np.ndarray:
    """u_N(t) = u_h,N(t) + u_1,N(t) - sum_j alpha_j u_2,j,N(t)"""
    ensure_solvable(nl, model.spec, force)
    hom = solve_homogeneous(plan, model, nl, u0, t, pool=pool, force=True)
    if f is None:
        return hom
    f.check_against(model.spec)
    u1 = solve_u1(plan, model, f, t, pool=pool, n_inner=n_inner, h_inner=h_inner)
    if nl.m == 0:
        return hom + u1
    u2 = solve_u2(plan, model, nl, f, t, pool=pool, n_inner=n_inner, h_inner=h_inner)
    return hom + u1 - u2


def nonlocal_residual(plan: SincPlan, model: OperatorModel, nl: NonlocalSpec, u0: VectorLike,
                      f: Optional[SourceTerm] = None, pool: Optional[NodePool] = None,
                      force: bool = False) -> float:
    """max-norm of u_N(0) + sum_k alpha_k u_N(t_k) - u0"""
    total = solve_full(plan, model, nl, u0, f, 0.0, pool=pool, force=force)
    for alpha, t_k in zip(nl.alphas, nl.times):
        total = total + alpha * solve_full(plan, model, nl, u0, f, t_k, pool=pool, force=force)
    return float(np.max(np.abs(total - model.as_vector(u0))))
