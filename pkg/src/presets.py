"""
Canned problems: the three reference test problems on A = -d^2/dx^2, their
reference tables, and the builder for custom problems described by a config dict.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np

from src.config import config
from src.exceptions import InvalidConfigError
from src.models import NonlocalSpec, SourceTerm, SpectralCharacteristics, StepRule, StudyConfig
from src.operators import (
    GreenFunctionModel,
    OperatorModel,
    VectorLike,
    fd_laplacian_model,
    green_function_model,
    scalar_model,
    spectral_mode_model,
)

logger = logging.getLogger(__name__)

PI2 = math.pi ** 2

# Sector half-angle for the reproduction runs; widens the strip so that the
# h = N^(-1/2) rule converges at rate c ~ 1.45.
REPRODUCTION_PHI = 5.0 * math.pi / 18.0
REPRODUCTION_N_LIST = [4, 8, 16, 32, 64, 128, 256, 512]
EVAL_X = 0.5
EVAL_T = 0.3
# Nonlocal residual check: pi/6 contour, uniform step rule, N = 128
RESIDUAL_PHI = math.pi / 6.0
RESIDUAL_N = 128

REFERENCE_TABLES: Dict[int, Dict[int, float]] = {
    1: {
        4: 0.29857983847712589e-1,
        8: 0.41823888073604986e-2,
        16: 0.11258594468208641e-2,
        32: 0.10042178166563831e-3,
        64: 0.28007158539828452e-5,
        128: 0.2098826601399176e-7,
        256: 0.1858929920173152e-10,
        512: 0.856837124351510e-15,
    },
    2: {
        4: -0.241535790017043e-1,
        8: -0.228401191029108e-1,
        16: -0.194273285627507e-1,
        32: -0.192905848633180e-1,
        64: -0.192911920318628e-1,
        128: -0.192907849909929e-1,
        256: -0.192907820740651e-1,
    },
    3: {
        4: 0.202211483120243,
        8: 0.726677678737409e-1,
        16: 0.138993889900620e-1,
        32: 0.143037059411419e-2,
        64: 0.554542099757830e-4,
        128: 0.532640823981411e-6,
        256: 0.730569324317506e-9,
        512: 0.648376079810788e-13,
    },
}

REFERENCE_RATES: Dict[int, float] = {
    4: 2.372652515388745588587496,
    8: 1.120148732795449515627946,
    16: 1.458741976765153165445005,
    32: 1.527648924601130131250452,
    64: 1.476794596387591759032900,
    128: 1.499935011373075736075927,
    256: 1.506597339081609844717370,
}


@dataclass
class Problem:
    """Everything a study needs: operator, nonlocal data, u0, f and the exact solution if known"""
    name: str
    model: OperatorModel
    nl: NonlocalSpec
    u0: VectorLike
    source: Optional[SourceTerm] = None
    exact: Optional[Callable[[float, float], float]] = None
    alpha: float = 0.5


def x_log_x(s):
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(s > 0.0, s * np.log(np.where(s > 0.0, s, 1.0)), 0.0)


def example_problem(example_id: int, phi: float = REPRODUCTION_PHI, n_quad: int = 128) -> Problem:
    if example_id == 1:
        model = spectral_mode_model(1, phi=phi)
        nl = NonlocalSpec(alphas=(0.5, 0.3), times=(0.2, 0.4), horizon=1.0)
        coeff = 1.0 + 0.5 * math.exp(-0.2 * PI2) + 0.3 * math.exp(-0.4 * PI2)
        return Problem(
            name="example-1",
            model=model,
            nl=nl,
            u0=np.array([coeff]),
            exact=lambda x, t: math.exp(-PI2 * t) * math.sin(math.pi * x),
            alpha=1.0,
        )
    if example_id == 2:
        model = green_function_model(n_quad, n_points=1, phi=phi)
        return Problem(
            name="example-2",
            model=model,
            nl=NonlocalSpec(alphas=(1.0,), times=(0.5,), horizon=1.0),
            u0=x_log_x,
            alpha=0.45,
        )
    if example_id == 3:
        model = spectral_mode_model(1, phi=phi)
        source = SourceTerm(eval=lambda t: np.array([(1.0 + PI2) * math.exp(t)]),
                            decay_delta=1.0, smoothness_alpha=1.0)
        return Problem(
            name="example-3",
            model=model,
            nl=NonlocalSpec(alphas=(0.5,), times=(0.2,), horizon=1.0),
            u0=np.array([1.0 + 0.5 * math.exp(0.2)]),
            source=source,
            exact=lambda x, t: math.exp(t) * math.sin(math.pi * x),
            alpha=1.0,
        )
    raise InvalidConfigError(f"Unknown example: {example_id!r}")


def example_study(example_id: int, **overrides) -> StudyConfig:
    """Reproduction settings: h = N^(-1/2), x = 0.5, t = 0.3, N = 4..512"""
    settings: Dict[str, Any] = dict(
        example_id=example_id,
        N_list=list(REPRODUCTION_N_LIST),
        x=EVAL_X,
        t=EVAL_T,
        mode=StepRule.INVERSE_SQRT,
        threads=config.threads,
    )
    settings.update(overrides)
    return StudyConfig(**settings)


def _build_operator(section: Dict[str, Any]) -> OperatorModel:
    kind = section.get("kind", "spectral")
    keys = ("phi", "M") if "rho0" in section else ("phi", "rho1", "M")
    shared = {key: section[key] for key in keys if key in section}
    if kind == "spectral":
        model = spectral_mode_model(section.get("n", 1), **shared)
    elif kind == "green":
        model = green_function_model(section.get("n", 128), n_points=section.get("n_points", 1), **shared)
    elif kind == "fd":
        model = fd_laplacian_model(section.get("n", 8), **shared)
    elif kind == "scalar":
        if "lambda" not in section or "rho0" not in section:
            raise InvalidConfigError("a scalar operator needs 'lambda' and 'rho0'")
        spec = SpectralCharacteristics(
            rho0=section["rho0"],
            phi=section.get("phi", config.default_phi),
            M=section.get("M", 1.0),
            rho1=section.get("rho1"),
        )
        return scalar_model(section["lambda"], spec)
    else:
        raise InvalidConfigError(f"Unknown operator kind: {kind!r}")
    if "rho0" in section:
        model.spec = model.spec.replace(rho0=section["rho0"],
                                        rho1=section.get("rho1", 0.5 * section["rho0"]))
    return model


def _build_initial(section: Dict[str, Any], model: OperatorModel) -> VectorLike:
    kind = section.get("kind", "mode")
    scale = float(section.get("scale", 1.0))
    if kind == "mode":
        if hasattr(model, "mode_vector"):
            return model.mode_vector(1, scale)
        if hasattr(model, "points"):
            return scale * np.sin(math.pi * model.points)
        return np.full(model.dim, scale)
    if kind == "xlogx":
        if not hasattr(model, "points"):
            raise InvalidConfigError("x ln x needs a grid-based operator (green or fd)")
        if isinstance(model, GreenFunctionModel):
            return lambda s: scale * x_log_x(s)
        return scale * x_log_x(model.points)
    if kind == "constant":
        return np.full(model.dim, scale)
    if kind == "vector":
        values = section.get("values")
        if values is None or len(values) != model.dim:
            raise InvalidConfigError(f"'values' must list {model.dim} numbers")
        return scale * np.asarray(values, dtype=float)
    raise InvalidConfigError(f"Unknown initial kind: {kind!r}")


def _build_source(section: Optional[Dict[str, Any]], model: OperatorModel) -> Optional[SourceTerm]:
    if not section or section.get("kind", "none") == "none":
        return None
    kind = section["kind"]
    scale = float(section.get("scale", 1.0))
    delta = float(section.get("delta", 1.0))
    shape = _build_initial({"kind": "mode"}, model)
    if callable(shape):
        shape = model.as_vector(shape)
    shape = np.asarray(shape, dtype=float)
    if kind == "example3":
        return SourceTerm(eval=lambda t: scale * (1.0 + PI2) * math.exp(t) * shape, decay_delta=delta)
    if kind == "exp_decay":
        return SourceTerm(eval=lambda t: scale * math.exp(-t) * shape, decay_delta=delta)
    raise InvalidConfigError(f"Unknown source kind: {kind!r}")


def build_problem(document: Dict[str, Any]) -> Problem:
    """Problem from a (schema-valid) config document"""
    example = document.get("example", "custom")
    if example in (1, 2, 3):
        return example_problem(example)
    model = _build_operator(document.get("operator", {}))
    nl_section = document.get("nonlocal", {})
    nl = NonlocalSpec(alphas=tuple(nl_section.get("alphas", ())), times=tuple(nl_section.get("times", ())),
                      horizon=nl_section.get("horizon"))
    u0 = _build_initial(document.get("initial", {}), model)
    source = _build_source(document.get("source"), model)
    alpha = document.get("study", {}).get("alpha", config.default_smoothness_alpha)
    return Problem(name="custom", model=model, nl=nl, u0=u0, source=source, alpha=alpha)
