import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import json

import numpy as np

from src.exceptions import InvalidCharacteristicsError, InvalidConfigError


class StepRule(str, Enum):
    """How a SincPlan picks its step h"""
    UNIFORM = "uniform"              # h = sqrt(2 pi d1 / (alpha (N+1)))
    FIXED_T = "fixed-t"              # h = c1 ln N / N
    INVERSE_SQRT = "inverse-sqrt"    # h = N^(-1/2)

    @classmethod
    def parse(cls, value: Any) -> "StepRule":
        if isinstance(value, cls):
            return value
        aliases = {"uniform_t0": cls.UNIFORM, "fixed_t": cls.FIXED_T, "inverse_sqrt": cls.INVERSE_SQRT}
        if value in aliases:
            return aliases[value]
        try:
            return cls(value)
        except ValueError:
            raise InvalidConfigError(f"Unknown step rule: {value!r}")


class Verdict(str, Enum):
    """Outcome of the solvability check"""
    UM1 = "UM1"          # sum |alpha_i| < 1
    UM2 = "UM2"          # sum |alpha_i| exp(-rho0 t_i) < 1
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SpectralCharacteristics:
    """Sector vertex rho0, half-angle phi, resolvent constant M and contour shift rho1"""
    rho0: float
    phi: float
    M: float = 1.0
    rho1: Optional[float] = None

    def __post_init__(self):
        if self.rho1 is None:
            object.__setattr__(self, "rho1", 0.5 * self.rho0)
        self.validate()

    def validate(self) -> None:
        if not (math.isfinite(self.rho0) and self.rho0 > 0.0):
            raise InvalidCharacteristicsError(f"rho0 must be positive, got {self.rho0}")
        if not 0.0 < self.phi < math.pi / 2:
            raise InvalidCharacteristicsError(f"phi must lie in (0, pi/2), got {self.phi}")
        if not self.M >= 1.0:
            raise InvalidCharacteristicsError(f"M must be >= 1, got {self.M}")
        if not 0.0 <= self.rho1 < self.rho0:
            raise InvalidCharacteristicsError(
                f"rho1 must lie in [0, rho0) = [0, {self.rho0}), got {self.rho1}"
            )

    @property
    def b0(self) -> float:
        return self.rho0 * math.tan(self.phi)

    @property
    def radius(self) -> float:
        """sqrt(rho0^2 + b0^2)"""
        return math.hypot(self.rho0, self.b0)

    def replace(self, **changes) -> "SpectralCharacteristics":
        values = asdict(self)
        values.update(changes)
        return SpectralCharacteristics(**values)


@dataclass(frozen=True)
class Hyperbola:
    """z(xi) = a cosh(xi) - i b sinh(xi)"""
    a: float
    b: float


@dataclass(frozen=True)
class NonlocalSpec:
    """Coefficients and points of u(0) + sum alpha_k u(t_k) = u0"""
    alphas: Tuple[float, ...] = ()
    times: Tuple[float, ...] = ()
    horizon: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        if self.horizon is None:
            object.__setattr__(self, "horizon", max(self.times) if self.times else 1.0)
        self.validate()

    def validate(self) -> None:
        if len(self.alphas) != len(self.times):
            raise InvalidConfigError(
                f"{len(self.alphas)} coefficients given for {len(self.times)} nonlocal points"
            )
        if not self.horizon > 0.0:
            raise InvalidConfigError(f"horizon must be positive, got {self.horizon}")
        previous = 0.0
        for t in self.times:
            if not t > previous:
                raise InvalidConfigError(f"nonlocal points must satisfy 0 < t_1 < ... < t_m, got {self.times}")
            previous = t
        if self.times and self.times[-1] > self.horizon:
            raise InvalidConfigError(f"t_m = {self.times[-1]} exceeds the horizon T = {self.horizon}")

    @property
    def m(self) -> int:
        return len(self.alphas)

    def alpha_array(self) -> np.ndarray:
        return np.asarray(self.alphas, dtype=float)

    def time_array(self) -> np.ndarray:
        return np.asarray(self.times, dtype=float)


@dataclass(frozen=True)
class SourceTerm:
    """Right-hand side f(t); analyticity in the sector is declared, not checked"""
    eval: Callable[[float], np.ndarray]
    decay_delta: float = 1.0
    smoothness_alpha: float = 1.0

    def __post_init__(self):
        if not self.decay_delta > 0.0:
            raise InvalidConfigError(f"decay_delta must be positive, got {self.decay_delta}")
        if not 0.0 < self.smoothness_alpha <= 1.0:
            raise InvalidConfigError(f"smoothness_alpha must lie in (0, 1], got {self.smoothness_alpha}")

    def check_against(self, spec: SpectralCharacteristics) -> None:
        limit = math.sqrt(2.0) * spec.rho0
        if self.decay_delta > limit:
            raise InvalidConfigError(f"decay_delta must lie in (0, sqrt(2) rho0] = (0, {limit:.6g}]")

    def sample(self, times: Sequence[float]) -> np.ndarray:
        """Rows f(t_0), f(t_1), ... stacked into a (len(times), dim) complex array"""
        return np.array([np.asarray(self.eval(float(t)), dtype=complex) for t in times])


@dataclass(frozen=True)
class RateEstimate:
    """Pairwise rate constant c from eps ~ exp(-c sqrt(N))"""
    n: int
    n_next: int
    c: Optional[float]
    valid: bool


@dataclass
class StudyConfig:
    """Settings for one convergence study"""
    example_id: Any = "custom"
    N_list: List[int] = field(default_factory=lambda: [4, 8, 16, 32, 64, 128, 256])
    x: float = 0.5
    t: float = 0.3
    mode: StepRule = StepRule.UNIFORM
    c1: float = 1.0
    alpha: Optional[float] = None
    output_path: Optional[str] = None
    format: str = "csv"
    threads: int = 1
    force: bool = False
    problem: Optional[Dict[str, Any]] = None

    def __post_init__(self):
        self.mode = StepRule.parse(self.mode)
        self.validate()

    def validate(self) -> None:
        if self.example_id not in (1, 2, 3, "custom"):
            raise InvalidConfigError(f"example_id must be 1, 2, 3 or 'custom', got {self.example_id!r}")
        if not self.N_list:
            raise InvalidConfigError("N_list must not be empty")
        if any(b <= a for a, b in zip(self.N_list, self.N_list[1:])):
            raise InvalidConfigError(f"N_list must be strictly increasing, got {self.N_list}")
        minimum = 2 if self.mode == StepRule.FIXED_T else 1
        if min(self.N_list) < minimum:
            raise InvalidConfigError(f"every N must be >= {minimum} in {self.mode.value} mode")
        if not 0.0 < self.x < 1.0:
            raise InvalidConfigError(f"x must lie in (0, 1), got {self.x}")
        if self.t < 0.0:
            raise InvalidConfigError(f"t must be >= 0, got {self.t}")
        if self.format not in ("csv", "jsonl"):
            raise InvalidConfigError(f"format must be 'csv' or 'jsonl', got {self.format!r}")
        if self.example_id == "custom" and self.problem is None:
            raise InvalidConfigError("a custom study needs a problem definition")


@dataclass
class ReportRow:
    """One line of a convergence report"""
    N: int
    value: Optional[float]
    error: Optional[float] = None
    rate_c: Optional[float] = None
    floor_flag: bool = False
    note: str = field(default="", compare=False)


@dataclass
class ConvergenceReport:
    """Rows ordered by N plus an echo of the study settings"""
    rows: List[ReportRow] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def row(self, n: int) -> Optional[ReportRow]:
        return next((r for r in self.rows if r.N == n), None)

    def fitted_rate(self) -> Optional[float]:
        """Least-squares slope of -ln(error) against sqrt(N) over rows off the precision floor"""
        usable = [r for r in self.rows
                  if r.error is not None and r.error > 0.0 and not r.floor_flag]
        if len(usable) < 2:
            return None
        x = np.sqrt([r.N for r in usable])
        y = -np.log([r.error for r in usable])
        slope, _ = np.polyfit(x, y, 1)
        return float(slope)

    def metadata_json(self) -> str:
        """Settings echo for the sidecar file; non-finite numbers become null"""
        clean = {k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                 for k, v in self.metadata.items()}
        return json.dumps(clean, ensure_ascii=False, indent=2, default=str)
