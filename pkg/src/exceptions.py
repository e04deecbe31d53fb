"""Error kinds raised by the solver stack.

The CLI maps them to exit codes: 0 success, 1 solver/config error, 2 unknown solvability.
"""

from typing import Optional


class NonlocalEvolveError(Exception):
    """Base class for every error raised by this package"""


class InvalidCharacteristicsError(NonlocalEvolveError, ValueError):
    """Spectral characteristics violate 0 < phi < pi/2, 0 <= rho1 < rho0 or M >= 1"""


class OutOfStripError(NonlocalEvolveError, ValueError):
    """Shift parameter nu lies outside [-d1/2, d1/2]"""


class ContourUnsafeError(NonlocalEvolveError, ValueError):
    """1 - sum |alpha_k| exp(-rho1 t_k) <= 0: B may vanish inside the strip"""

    def __init__(self, message: str, dominant_index: Optional[int] = None,
                 dominant_time: Optional[float] = None):
        super().__init__(message)
        self.dominant_index = dominant_index
        self.dominant_time = dominant_time


class SolvabilityError(NonlocalEvolveError):
    """Neither sufficient solvability condition holds and the run was not forced"""


class SingularResolventError(NonlocalEvolveError, ArithmeticError):
    """zI - A is singular (z hits an eigenvalue or a zero pivot was met)"""


class OracleFailure(NonlocalEvolveError, RuntimeError):
    """Reference computation did not reach its tolerance"""


class InvalidConfigError(NonlocalEvolveError, ValueError):
    """Configuration document or study settings are invalid"""
