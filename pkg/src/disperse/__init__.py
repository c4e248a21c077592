"""Conservative WENO finite differences for u_t + f(u)_x + g(u)_xxx = 0.

Two dispersion-flux reconstructions are provided: WENO-E, built on an
exponential approximation space with tension parameter ``lambda * dx``,
and the polynomial WENO-Z baseline.
"""

from .errors import (
    ConditioningFailure,
    DegenerateKernel,
    DegenerateProblem,
    DisperseError,
    LengthMismatch,
    NonFiniteState,
    RefusesWithoutExact,
    UnknownProblem,
    WindowTooShort,
)
from .kernels import KernelTable, build_kernel_table

__version__ = "0.1.0"

__all__ = [
    "ConditioningFailure",
    "DegenerateKernel",
    "DegenerateProblem",
    "DisperseError",
    "KernelTable",
    "LengthMismatch",
    "NonFiniteState",
    "RefusesWithoutExact",
    "UnknownProblem",
    "WindowTooShort",
    "build_kernel_table",
]
