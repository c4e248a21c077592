"""Third-order SSP Runge-Kutta stepping and CFL step-size control."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateProblem, NonFiniteState

# stage combinations: u2 = 3/4 u0 + 1/4 (u1 + dt L u1), u3 = 1/3 u0 + 2/3 (u2 + dt L u2)
STAGE2 = (0.75, 0.25)
STAGE3 = (1.0 / 3.0, 2.0 / 3.0)


def ssp_rk3_step(state: np.ndarray, rhs: Callable[[np.ndarray], np.ndarray], dt: float) -> np.ndarray:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    u0 = np.asarray(state, dtype=float)
    # overflow shows up as non-finite output, which is reported below
    with np.errstate(over="ignore", invalid="ignore"):
        u1 = u0 + dt * rhs(u0)
        u2 = STAGE2[0] * u0 + STAGE2[1] * (u1 + dt * rhs(u1))
        u3 = STAGE3[0] * u0 + STAGE3[1] * (u2 + dt * rhs(u2))
    if not np.all(np.isfinite(u3)):
        raise NonFiniteState("non-finite values after SSP-RK3 step")
    return u3


def cfl_dt(max_fprime: float, max_gprime: float, dx: float, cfl: float = 0.3) -> float:
    """min(cfl dx^{5/3} / max|f'|, cfl dx^3 / max|g'|); a zero bound drops its branch."""
    if not dx > 0:
        raise ValueError(f"dx must be positive, got {dx}")
    candidates = []
    if max_fprime > 0:
        candidates.append(cfl * dx ** (5.0 / 3.0) / max_fprime)
    if max_gprime > 0:
        candidates.append(cfl * dx**3 / max_gprime)
    if not candidates:
        raise DegenerateProblem("both wave-speed bounds vanish; no CFL step exists")
    return min(candidates)


@dataclass
class StepController:
    """Chooses step sizes that land exactly on every checkpoint and on T."""

    T: float
    cfl: float = 0.3
    fixed_dt: float | None = None
    t: float = 0.0
    checkpoints: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.fixed_dt is not None and not self.fixed_dt > 0:
            raise ValueError(f"fixed_dt must be positive, got {self.fixed_dt}")
        if self.t > self.T:
            raise ValueError(f"start time {self.t} is past final time {self.T}")
        self.checkpoints = sorted(c for c in self.checkpoints if self.t < c < self.T)

    @property
    def done(self) -> bool:
        return self.t >= self.T

    def next_stop(self) -> float:
        for c in self.checkpoints:
            if c > self.t:
                return c
        return self.T

    def propose(self, max_fprime: float, max_gprime: float, dx: float) -> float:
        if self.fixed_dt is not None:
            dt = self.fixed_dt
        else:
            dt = cfl_dt(max_fprime, max_gprime, dx, self.cfl)
        stop = self.next_stop()
        # avoid a sliver step just before a stop
        if self.t + dt >= stop or stop - (self.t + dt) < 1e-12 * max(1.0, abs(stop)):
            dt = stop - self.t
        return dt

    def advance(self, dt: float) -> float:
        stop = self.next_stop()
        self.t = stop if abs(self.t + dt - stop) <= 1e-14 * max(1.0, abs(stop)) else self.t + dt
        return self.t
