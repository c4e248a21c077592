"""Benchmark problems: fluxes, initial data, boundary rules and exact solutions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import LengthMismatch, UnknownProblem
from .flux1d import FluxFunction


class Boundary(enum.Enum):
    PERIODIC = "periodic"
    INFLOW_OUTFLOW = "inflow-outflow"


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    dim: int
    domain: tuple  # ((xl, xr),) or ((xl, xr), (yl, yr))
    f: FluxFunction | None
    g: FluxFunction
    ic: Callable
    bc: Boundary
    default_T: float
    default_n: int
    exact: Callable | None = None
    epsilon: float | None = None
    # dt = fixed_dt_coeff * dx^3 instead of the CFL rule
    fixed_dt_coeff: float | None = None
    # errors are measured only on nodes inside this interval
    error_window: tuple | None = None
    description: str = ""
    snapshot_times: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class ErrorNorms:
    linf: float
    l1: float


def error_norms(numeric, exact_values) -> ErrorNorms:
    """L-infinity and mean absolute error over all supplied points."""
    numeric = np.asarray(numeric, dtype=float)
    exact_values = np.asarray(exact_values, dtype=float)
    if numeric.shape != exact_values.shape:
        raise LengthMismatch(f"numeric shape {numeric.shape} != exact shape {exact_values.shape}")
    if numeric.size == 0:
        raise LengthMismatch("cannot take norms of empty arrays")
    err = np.abs(numeric - exact_values)
    return ErrorNorms(float(err.max()), float(err.sum() / err.size))


# {{{ flux functions


def _linear(c: float, label: str) -> FluxFunction:
    # the derivative is a scalar: broadcasting covers every use and skips an allocation
    return FluxFunction(lambda u: c * u, lambda u: c, label)


def _power(coeff: float, p: int, label: str) -> FluxFunction:
    return FluxFunction(lambda u: coeff * u**p, lambda u: coeff * p * u ** (p - 1), label)


# }}}


# {{{ profiles


def _sech2(z):
    return 1.0 / np.cosh(z) ** 2


def k22_compacton(x, t, c=1.0, x0=0.0):
    """(4c/3) cos^2((x - x0 - ct)/4) on |x - x0 - ct| <= 2 pi, zero elsewhere."""
    z = np.asarray(x, dtype=float) - x0 - c * t
    return np.where(np.abs(z) <= 2 * np.pi, 4 * c / 3 * np.cos(z / 4) ** 2, 0.0)


def k33_compacton(x, t, c=1.0, x0=0.0):
    """sqrt(3c/2) cos((x - x0 - ct)/3) on |x - x0 - ct| <= 3 pi/2, zero elsewhere."""
    z = np.asarray(x, dtype=float) - x0 - c * t
    return np.where(np.abs(z) <= 1.5 * np.pi, np.sqrt(1.5 * c) * np.cos(z / 3), 0.0)


K33_TRIO = ((np.sqrt(3.0), 10.0), (1.5, 25.0), (np.sqrt(1.5), 40.0))


def _k33_trio(x):
    # amplitude A travels at c = 2 A^2 / 3
    return sum(k33_compacton(x, 0.0, c=2 * a * a / 3, x0=x0) for a, x0 in K33_TRIO)


def _tophat(x):
    x = np.asarray(x, dtype=float)
    # a node sitting exactly on a jump takes the state to its left
    return np.where((x > 0.25) & (x <= 4.0), 1.0, 0.0)


# }}}


def _build_catalog() -> dict[str, ProblemSpec]:
    two_pi = 2 * np.pi
    eps = 1e-4
    specs = [
        ProblemSpec(
            name="airy1d",
            dim=1,
            domain=((0.0, two_pi),),
            f=None,
            g=_linear(1.0, "u"),
            ic=np.sin,
            bc=Boundary.PERIODIC,
            default_T=1.0,
            default_n=80,
            exact=lambda x, t: np.sin(x + t),
            description="u_t + u_xxx = 0",
        ),
        ProblemSpec(
            name="linear2d",
            dim=2,
            domain=((0.0, two_pi), (0.0, two_pi)),
            f=None,
            g=_linear(1.0, "u"),
            ic=lambda x, y: np.sin(x + y),
            bc=Boundary.PERIODIC,
            default_T=1.0,
            default_n=40,
            exact=lambda x, y, t: np.sin(x + y + 2 * t),
            fixed_dt_coeff=0.1,
            description="u_t + u_xxx + u_yyy = 0",
        ),
        ProblemSpec(
            name="kdv_soliton",
            dim=1,
            domain=((-10.0, 10.0),),
            f=_power(-3.0, 2, "-3u^2"),
            g=_linear(1.0, "u"),
            ic=lambda x: -2.0 * _sech2(x),
            bc=Boundary.PERIODIC,
            default_T=0.5,
            default_n=160,
            exact=lambda x, t: -2.0 * _sech2(x - 4 * t),
            description="u_t - 3(u^2)_x + u_xxx = 0",
        ),
        ProblemSpec(
            name="kdv_zero_dispersion_sine",
            dim=1,
            domain=((0.0, 1.0),),
            f=_power(0.5, 2, "u^2/2"),
            g=_linear(eps, "eps u"),
            ic=lambda x: 2.0 + 0.5 * np.sin(two_pi * x),
            bc=Boundary.PERIODIC,
            default_T=0.5,
            default_n=200,
            epsilon=eps,
            description="u_t + (u^2/2)_x + eps u_xxx = 0, smooth periodic data",
        ),
        ProblemSpec(
            name="kdv_zero_dispersion_tophat",
            dim=1,
            domain=((0.0, 5.0),),
            f=_power(0.5, 2, "u^2/2"),
            g=_linear(eps, "eps u"),
            ic=_tophat,
            bc=Boundary.INFLOW_OUTFLOW,
            default_T=0.1,
            default_n=1500,
            epsilon=eps,
            description="u_t + (u^2/2)_x + eps u_xxx = 0, top-hat data",
            snapshot_times=(0.01, 0.05, 0.1),
        ),
        ProblemSpec(
            name="k22_travel",
            dim=1,
            domain=((-4 * np.pi, 4 * np.pi),),
            f=_power(1.0, 2, "u^2"),
            g=_power(1.0, 2, "u^2"),
            ic=lambda x: k22_compacton(x, 0.0),
            bc=Boundary.PERIODIC,
            default_T=np.pi / 2,
            default_n=160,
            exact=lambda x, t: k22_compacton(x, t),
            error_window=(0.0, two_pi),
            description="u_t + (u^2)_x + (u^2)_xxx = 0, single compacton c = 1",
        ),
        ProblemSpec(
            name="k22_breakup",
            dim=1,
            domain=((-5 * np.pi, 25 * np.pi),),
            f=_power(1.0, 2, "u^2"),
            g=_power(1.0, 2, "u^2"),
            ic=lambda x: np.where(np.abs(x) <= 4 * np.pi, 4 / 3 * np.cos(np.asarray(x) / 8) ** 2, 0.0),
            bc=Boundary.PERIODIC,
            default_T=120.0,
            default_n=400,
            description="u_t + (u^2)_x + (u^2)_xxx = 0, wide compacton splitting",
            snapshot_times=(10.0, 50.0),
        ),
        ProblemSpec(
            name="k33_interaction",
            dim=1,
            domain=((0.0, 30 * np.pi),),
            f=_power(1.0, 3, "u^3"),
            g=_power(1.0, 3, "u^3"),
            ic=_k33_trio,
            bc=Boundary.PERIODIC,
            default_T=50.0,
            default_n=600,
            description="u_t + (u^3)_x + (u^3)_xxx = 0, three colliding compactons",
            snapshot_times=(10.0, 25.0),
        ),
        ProblemSpec(
            name="k33_breakup",
            dim=1,
            domain=((-6 * np.pi, 6 * np.pi),),
            f=_power(1.0, 3, "u^3"),
            g=_power(1.0, 3, "u^3"),
            ic=lambda x: np.where(np.abs(x) <= 3 * np.pi, np.sqrt(1.5) * np.cos(np.asarray(x) / 6), 0.0),
            bc=Boundary.PERIODIC,
            default_T=8.0,
            default_n=400,
            description="u_t + (u^3)_x + (u^3)_xxx = 0, wide compacton splitting",
            snapshot_times=(2.0, 6.0),
        ),
    ]
    return {s.name: s for s in specs}


CATALOG = _build_catalog()
PROBLEM_NAMES = tuple(CATALOG)


def catalog(name: str) -> ProblemSpec:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownProblem(f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES)}") from None
