"""
Sinc quadrature for the homogeneous part u_h(t) = e^(-At) B(A)^(-1) u0.

The contour integral over the integration hyperbola is discretized by the trapezoid
rule at xi_k = k h, k = -N..N, with the modified resolvent (zI - A)^(-1) - I/z.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.config import config
from src.contour import hyperbola_nodes, integration_hyperbola, strip_height
from src.exceptions import InvalidConfigError, SolvabilityError
from src.models import Hyperbola, NonlocalSpec, RateEstimate, SpectralCharacteristics, StepRule, Verdict
from src.node_pool import NodePool, run_ordered
from src.operators import OperatorModel, VectorLike
from src.symbol import check_solvability, q_bound, symbol_B

logger = logging.getLogger(__name__)

# Terms with a_I t cosh(xi) beyond -(ln(min normal) + 20) contribute nothing in double precision
DROP_EXPONENT = -(math.log(np.finfo(float).tiny) + 20.0)
SYMMETRY_TOL = 1e-12
FLOOR_FACTOR = 50.0


@dataclass(frozen=True)
class SincPlan:
    """Truncation N, step h and the cached contour data at xi_k = k h"""
    N: int
    h: float
    mode: StepRule
    c1: float
    alpha: float
    spec: SpectralCharacteristics
    hyperbola: Hyperbola
    d1: float
    xi: np.ndarray = field(repr=False, compare=False)
    z: np.ndarray = field(repr=False, compare=False)
    dz: np.ndarray = field(repr=False, compare=False)
    nl: Optional[NonlocalSpec] = None
    B: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    Q: Optional[float] = None

    def index(self, k: int) -> int:
        if not -self.N <= k <= self.N:
            raise IndexError(f"node index {k} outside -{self.N}..{self.N}")
        return k + self.N

    def symbol_values(self, nl: NonlocalSpec) -> np.ndarray:
        """B(z_k) for every node, from the cache when the plan was built for nl"""
        if self.B is not None and nl == self.nl:
            return self.B
        return symbol_B(nl, self.z)


def step_size(d1: float, alpha: float, N: int, mode: StepRule, c1: float = 1.0) -> float:
    mode = StepRule.parse(mode)
    if mode == StepRule.UNIFORM:
        return math.sqrt(2.0 * math.pi * d1 / (alpha * (N + 1)))
    if mode == StepRule.FIXED_T:
        return c1 * math.log(N) / N
    return 1.0 / math.sqrt(N)


def make_plan(spec: SpectralCharacteristics, alpha: float, N: int, mode=None,
              c1: Optional[float] = None, nl: Optional[NonlocalSpec] = None) -> SincPlan:
    mode = StepRule.parse(config.default_mode if mode is None else mode)
    c1 = config.default_c1 if c1 is None else c1
    if N < 1:
        raise InvalidConfigError(f"N must be >= 1, got {N}")
    if not 0.0 < alpha <= 1.0:
        raise InvalidConfigError(f"alpha must lie in (0, 1], got {alpha}")
    if mode == StepRule.FIXED_T:
        if N < 2:
            raise InvalidConfigError("fixed-t mode needs N >= 2")
        if not c1 > 0.0:
            raise InvalidConfigError(f"c1 must be positive, got {c1}")

    d1 = strip_height(spec)
    hyperbola = integration_hyperbola(spec)
    h = step_size(d1, alpha, N, mode, c1)
    xi, z, dz = hyperbola_nodes(hyperbola, N, h)

    B = None
    Q = None
    if nl is not None and nl.m > 0:
        Q = q_bound(nl, spec)
        B = symbol_B(nl, z)

    logger.info(f"Sinc plan: N={N}, h={h:.6g} ({mode.value}), d1={d1:.6g}, "
                f"a_I={hyperbola.a:.6g}, b_I={hyperbola.b:.6g}")
    return SincPlan(N=N, h=h, mode=mode, c1=c1, alpha=alpha, spec=spec, hyperbola=hyperbola,
                    d1=d1, xi=xi, z=z, dz=dz, nl=nl, B=B, Q=Q)


def _log_cosh(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


def active_nodes(plan: SincPlan, t: float) -> np.ndarray:
    """Boolean mask of the nodes whose e^(-z t) factor is representable"""
    mask = np.isfinite(plan.z) & np.isfinite(plan.dz)
    if t > 0.0:
        mask &= math.log(plan.hyperbola.a * t) + _log_cosh(plan.xi) <= math.log(DROP_EXPONENT)
    return mask


def ensure_solvable(nl: NonlocalSpec, spec: SpectralCharacteristics, force: bool = False) -> Verdict:
    verdict = check_solvability(nl, spec)
    if verdict == Verdict.UNKNOWN:
        if not force:
            raise SolvabilityError(
                "solvability Unknown: neither sum |alpha| < 1 nor sum |alpha| exp(-rho0 t) < 1 holds"
            )
        logger.warning("Solvability Unknown; proceeding because force is set")
    return verdict


def is_real_data(model: OperatorModel, *vectors: np.ndarray) -> bool:
    return model.is_real and all(not np.iscomplexobj(v) or not np.any(np.imag(v)) for v in vectors)


def contour_sum(plan: SincPlan, terms: Sequence[Optional[np.ndarray]], dim: int) -> np.ndarray:
    """
    (h / 2 pi i) * sum of the node terms, accumulated center-out: k = 0 first,
    then (F_k + F_-k) for k = 1..N. Missing terms count as zero.
    """
    N = plan.N
    total = np.zeros(dim, dtype=complex)
    center = terms[N]
    if center is not None:
        total = total + center
    for k in range(1, N + 1):
        plus = terms[N + k]
        minus = terms[N - k]
        if plus is None and minus is None:
            continue
        pair = (plus if plus is not None else 0.0) + (minus if minus is not None else 0.0)
        total = total + pair
    return plan.h / (2j * math.pi) * total


def symmetry_residual(value: np.ndarray) -> float:
    """max |Im v| / (1 + max |Re v|); zero for an exactly conjugate-symmetric sum"""
    scale = 1.0 + float(np.max(np.abs(np.real(value)), initial=0.0))
    return float(np.max(np.abs(np.imag(value)), initial=0.0)) / scale


def finish_real(value: np.ndarray, real: bool, label: str) -> np.ndarray:
    """Drop the imaginary part of a result that must be real, after the symmetry check"""
    if not real:
        return value
    residual = symmetry_residual(value)
    if residual > SYMMETRY_TOL:
        logger.warning(f"{label}: relative conjugate-symmetry residual {residual:.3e} exceeds {SYMMETRY_TOL:g}")
    return value.real.copy()


def _resolvent_term(model: OperatorModel, z: complex, v: VectorLike, v_vec: np.ndarray,
                    modified: bool) -> np.ndarray:
    """(zI - A)^(-1) v, minus v/z when modified; callables go to the model unsampled"""
    resolved = model.resolvent_apply(z, v)
    return resolved - v_vec / z if modified else resolved


def integrand_F(plan: SincPlan, model: OperatorModel, nl: NonlocalSpec, u0: VectorLike,
                t: float, k: int, modified: bool = True) -> np.ndarray:
    """e^(-z_k t) z'_k B(z_k)^(-1) [(z_k I - A)^(-1) u0 - u0 / z_k]"""
    i = plan.index(k)
    z = complex(plan.z[i])
    factor = np.exp(-z * t) * plan.dz[i] / plan.symbol_values(nl)[i]
    return factor * _resolvent_term(model, z, u0, model.as_vector(u0), modified)


def solve_homogeneous(plan: SincPlan, model: OperatorModel, nl: NonlocalSpec, u0: VectorLike,
                      t: float, pool: Optional[NodePool] = None, force: bool = False,
                      modified: bool = True) -> np.ndarray:
    """u_h,N(t) = (h / 2 pi i) sum_k F(t, z(kh))"""
    if t < 0.0:
        raise InvalidConfigError(f"t must be >= 0, got {t}")
    ensure_solvable(nl, model.spec, force)
    if nl.m > 0 and not (plan.Q is not None and plan.nl == nl):
        q_bound(nl, plan.spec)

    u0_vec = model.as_vector(u0)
    B = plan.symbol_values(nl)
    mask = active_nodes(plan, t)
    indices = np.flatnonzero(mask)

    def node_term(i: int) -> np.ndarray:
        z = complex(plan.z[i])
        factor = np.exp(-z * t) * plan.dz[i] / B[i]
        return factor * _resolvent_term(model, z, u0, u0_vec, modified)

    values = run_ordered(node_term, indices, pool)
    terms: List[Optional[np.ndarray]] = [None] * (2 * plan.N + 1)
    for i, value in zip(indices, values):
        terms[i] = value

    logger.debug(f"Homogeneous solve at t={t}: {len(indices)} of {2 * plan.N + 1} nodes used")
    result = contour_sum(plan, terms, model.dim)
    return finish_real(result, is_real_data(model, u0_vec), "homogeneous solve")


def estimate_rate_constant(errors: Iterable[Tuple[int, float]], scale: float = 1.0) -> List[RateEstimate]:
    """
    c = ln(eps_N / eps_N') / (sqrt(N') - sqrt(N)) for consecutive pairs; with N' = 2N this is
    ln(eps_N / eps_2N) / ((sqrt(2) - 1) sqrt(N)). Pairs touching the precision floor are invalid.
    """
    floor = FLOOR_FACTOR * np.finfo(float).eps * scale
    pairs = list(errors)
    estimates = []
    for (n, e_n), (n_next, e_next) in zip(pairs, pairs[1:]):
        if e_n is None or e_next is None or e_n <= floor or e_next <= floor:
            logger.warning(f"Rate pair N={n}->{n_next} at the precision floor; excluded")
            estimates.append(RateEstimate(n=n, n_next=n_next, c=None, valid=False))
            continue
        c = math.log(e_n / e_next) / (math.sqrt(n_next) - math.sqrt(n))
        estimates.append(RateEstimate(n=n, n_next=n_next, c=c, valid=True))
    return estimates
