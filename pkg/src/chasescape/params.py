"""Model parameters and shared error types."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

# lambda * r * w must stay an exactly representable double for every reachable
# state, which caps the white-site budget
MAX_N = 10**8


class ParameterError(ValueError):
    """Invalid model or experiment parameters."""


class NoTransitionError(RuntimeError):
    """A jump was requested from a state with no available transition."""


class QuadratureError(RuntimeError):
    """Numerical integration could not reach its error target."""


class ResourceLimitError(RuntimeError):
    """A simulation would exceed a configured resource cap."""


class InitMode(enum.Enum):
    """Initial condition of the process.

    STANDARD starts with one red root and n white sites on a complete graph
    with n+1 vertices; red converts spontaneously at rate alpha.

    KORTCHEMSKI starts with one red, one blue, and n white sites on n+2
    vertices and runs plain chase-escape: the conversion mechanism is off,
    so the ``alpha`` field of :class:`Params` has no effect on the dynamics.
    """

    STANDARD = "standard"
    KORTCHEMSKI = "kortchemski"


@dataclass(frozen=True)
class Params:
    """Rates and initial condition shared by every simulation engine.

    n      white-site budget; the graph is K_{n+1} (standard mode) or
           K_{n+2} (kortchemski mode)
    lam    rate at which red spreads across each red-white edge
    alpha  spontaneous red-to-blue conversion rate per red vertex
           (ignored in kortchemski mode, see :class:`InitMode`)
    """

    n: int
    lam: float
    alpha: float
    init_mode: InitMode = InitMode.STANDARD

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise ParameterError(f"n must be an integer, got {self.n!r}")
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if self.n > MAX_N:
            raise ParameterError(f"n must be <= {MAX_N}, got {self.n}")
        if not (isinstance(self.lam, (int, float)) and math.isfinite(self.lam)) or self.lam <= 0:
            raise ParameterError(f"lambda must be a positive finite real, got {self.lam!r}")
        if not (isinstance(self.alpha, (int, float)) and math.isfinite(self.alpha)) or self.alpha < 0:
            raise ParameterError(f"alpha must be a non-negative finite real, got {self.alpha!r}")
        if not isinstance(self.init_mode, InitMode):
            raise ParameterError(f"init_mode must be an InitMode, got {self.init_mode!r}")
        if self.init_mode is InitMode.STANDARD and self.alpha == 0:
            # with no blue seed and no conversion, blue can never appear and
            # the process never fixates
            raise ParameterError("alpha = 0 with the standard initial condition never fixates")

    @property
    def total_vertices(self) -> int:
        return self.n + (2 if self.init_mode is InitMode.KORTCHEMSKI else 1)

    @property
    def conversion_rate(self) -> float:
        """Effective conversion rate: alpha in standard mode, 0 otherwise."""
        if self.init_mode is InitMode.KORTCHEMSKI:
            return 0.0
        return float(self.alpha)

    @property
    def initial_red_blue(self) -> tuple[int, int]:
        if self.init_mode is InitMode.KORTCHEMSKI:
            return 1, 1
        return 1, 0
