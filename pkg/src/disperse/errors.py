"""Exception types raised by the solver library."""

from __future__ import annotations


class DisperseError(Exception):
    """Base class for all library errors."""


class ConditioningFailure(DisperseError):
    """A kernel linear solve did not pass its accuracy self-check."""


class DegenerateKernel(DisperseError):
    """A leading substencil coefficient vanished; ideal weights are undefined."""


class WindowTooShort(DisperseError):
    """The padded field does not provide the ghost cells a stencil needs."""


class NonFiniteState(DisperseError):
    """A time step produced NaN or Inf values."""

    def __init__(self, message: str, t: float | None = None, step: int | None = None):
        super().__init__(message)
        self.t = t
        self.step = step


class DegenerateProblem(DisperseError):
    """Both wave-speed bounds vanish, so no CFL time step exists."""


class UnknownProblem(DisperseError, KeyError):
    """The requested problem name is not in the catalog."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class LengthMismatch(DisperseError, ValueError):
    """Two arrays that must be aligned have different lengths."""


class RefusesWithoutExact(DisperseError):
    """An error-norm study was requested for a problem with no exact solution."""
