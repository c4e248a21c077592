"""Conservative numerical fluxes and the method-of-lines right-hand sides.

Every operator takes a field padded with ``ghost`` cells on each side along
the last axis and returns values for the ``n`` interior nodes (or the
``n + 1`` interfaces x_{-1/2}..x_{n-1/2}). Leading axes are independent
lines, which is how the 2D solver sweeps rows and columns.

Both dispersion and convection reconstruct the negative flux by mirroring:
the positive-flux routine runs on the index-reversed array and the result is
reversed back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numba
import numpy as np

from .errors import WindowTooShort
from .kernels import KernelTable
from .weights import Scheme, weights_scalar

GHOST = 4
CONVECTION_LINEAR_WEIGHTS = (0.1, 0.6, 0.3)


@dataclass(frozen=True)
class FluxFunction:
    """A scalar flux with a closed-form derivative for wave-speed bounds."""

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def __call__(self, u):
        return self.value(u)

    def max_speed(self, u) -> float:
        return float(np.max(np.abs(self.derivative(u))))


@dataclass(frozen=True)
class SplitFlux:
    plus: np.ndarray
    minus: np.ndarray
    alpha: float


@dataclass(frozen=True)
class HalfPointFlux:
    values: np.ndarray
    order: int = 5


def lax_friedrichs_split(u, g: Callable, gprime_bound: float) -> SplitFlux:
    """g^{+-}(u) = (g(u) +- alpha u) / 2 with alpha = gprime_bound."""
    u = np.asarray(u, dtype=float)
    gu = g(u)
    au = gprime_bound * u
    return SplitFlux(0.5 * (gu + au), 0.5 * (gu - au), float(gprime_bound))


# {{{ compiled per-interface loops


@numba.njit(cache=True)
def _dispersion_windows(a, start, count, sub, ud3, ud4, Q, d, eps, use_z):
    rows = a.shape[0]
    out = np.empty((rows, count))
    v = np.empty(7)
    for r in range(rows):
        for k in range(count):
            p = start + k
            # every kernel and indicator annihilates constants, so shifting
            # by the centre value only removes cancellation error
            c = a[r, p + 2]
            for j in range(7):
                v[j] = a[r, p + j] - c
            g0 = 0.0
            g1 = 0.0
            g2 = 0.0
            for j in range(5):
                g0 += sub[0, j] * v[j]
                g1 += sub[1, j] * v[j + 1]
                g2 += sub[2, j] * v[j + 2]
            b = np.zeros(3)
            if use_z:
                for m in range(3):
                    acc = 0.0
                    for j in range(5):
                        row = 0.0
                        for l in range(5):
                            row += Q[m, j, l] * v[m + l]
                        acc += v[m + j] * row
                    b[m] = acc if acc > 0.0 else 0.0
            else:
                for m in range(3):
                    s3 = 0.0
                    s4 = 0.0
                    for j in range(5):
                        s3 += ud3[m, j] * v[m + j]
                        s4 += ud4[m, j] * v[m + j]
                    b[m] = abs(s3) + abs(s4)
            w0, w1, w2 = weights_scalar(b[0], b[1], b[2], d[0], d[1], d[2], eps)
            out[r, k] = w0 * g0 + w1 * g1 + w2 * g2
    return out


@numba.njit(cache=True)
def _convection_windows(a, start, count, eps):
    rows = a.shape[0]
    out = np.empty((rows, count))
    for r in range(rows):
        for k in range(count):
            p = start + k
            c = a[r, p + 2]
            v0 = a[r, p] - c
            v1 = a[r, p + 1] - c
            v2 = 0.0
            v3 = a[r, p + 3] - c
            v4 = a[r, p + 4] - c
            q0 = (2.0 * v0 - 7.0 * v1 + 11.0 * v2) / 6.0
            q1 = (-v1 + 5.0 * v2 + 2.0 * v3) / 6.0
            q2 = (2.0 * v2 + 5.0 * v3 - v4) / 6.0
            b0 = 13.0 / 12.0 * (v0 - 2.0 * v1 + v2) ** 2 + 0.25 * (v0 - 4.0 * v1 + 3.0 * v2) ** 2
            b1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3) ** 2 + 0.25 * (v1 - v3) ** 2
            b2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4) ** 2 + 0.25 * (3.0 * v2 - 4.0 * v3 + v4) ** 2
            w0, w1, w2 = weights_scalar(b0, b1, b2, 0.1, 0.6, 0.3, eps)
            out[r, k] = c + (w0 * q0 + w1 * q1 + w2 * q2)
    return out


# }}}


def _as_lines(a) -> tuple[np.ndarray, tuple]:
    a = np.asarray(a, dtype=float)
    lead = a.shape[:-1]
    if a.ndim == 2 and a.flags.c_contiguous:
        return a, lead
    return np.ascontiguousarray(a.reshape(-1, a.shape[-1])), lead


def _check_padding(length: int, ghost: int, left: int, right: int) -> int:
    n = length - 2 * ghost
    if ghost < max(left, right) or n < 1:
        raise WindowTooShort(
            f"stencil needs {left} ghost cells on the left and {right} on the right; "
            f"got ghost={ghost} with padded length {length}"
        )
    return n


def _dispersion_interfaces(a, table: KernelTable, dx: float, scheme, ghost: int, mirrored: bool):
    scheme = Scheme.parse(scheme)
    lines, lead = _as_lines(a)
    length = lines.shape[1]
    n = _check_padding(length, ghost, 4 if mirrored else 3, 3 if mirrored else 4)

    args = (
        table.sub_coeffs,
        table.ud3_coeffs,
        table.ud4_coeffs,
        table.z_forms,
        table.ideal_weights,
        dx * dx,
        scheme is Scheme.Z,
    )
    if not mirrored:
        # window a[p..p+6] serves the interface between padded p+2 and p+3
        out = _dispersion_windows(lines, ghost - 3, n + 1, *args)
    else:
        windows = length - 6
        rev = np.ascontiguousarray(lines[:, ::-1])
        out = _dispersion_windows(rev, windows - 1 - (ghost + n - 4), n + 1, *args)[:, ::-1]
    return out.reshape(lead + (n + 1,))


def dispersion_flux_plus(gplus, table: KernelTable, dx: float, scheme="E", ghost: int = GHOST) -> HalfPointFlux:
    """G^+ at the n + 1 interfaces from the upwind 7-point windows {i-2..i+4}."""
    return HalfPointFlux(_dispersion_interfaces(gplus, table, dx, scheme, ghost, mirrored=False))


def dispersion_flux_minus(gminus, table: KernelTable, dx: float, scheme="E", ghost: int = GHOST) -> HalfPointFlux:
    """G^- at the n + 1 interfaces from the mirrored windows {i+3..i-3}."""
    return HalfPointFlux(_dispersion_interfaces(gminus, table, dx, scheme, ghost, mirrored=True))


def _split_speed(u, flux: Callable, bound) -> float:
    if bound is not None:
        return float(bound)
    if isinstance(flux, FluxFunction):
        return flux.max_speed(u)
    raise TypeError("a wave-speed bound is required when the flux has no derivative")


def dispersion_rhs(u, g: Callable, table: KernelTable, dx: float, scheme="E", alpha=None, ghost: int = GHOST):
    """-(G_{i+1/2} - G_{i-1/2}) / dx^3 at interior nodes, G = G^+ + G^-."""
    u = np.asarray(u, dtype=float)
    split = lax_friedrichs_split(u, g, _split_speed(u, g, alpha))
    flux = dispersion_flux_plus(split.plus, table, dx, scheme, ghost).values
    # a linear flux split at its own speed leaves g^- identically zero
    if np.any(split.minus):
        flux = flux + dispersion_flux_minus(split.minus, table, dx, scheme, ghost).values
    return -(flux[..., 1:] - flux[..., :-1]) / dx**3


def convection_flux(u, f: Callable, fprime_bound: float, dx: float, ghost: int = GHOST) -> HalfPointFlux:
    """Fifth-order WENO-Z flux F at the n + 1 interfaces."""
    split = lax_friedrichs_split(u, f, fprime_bound)
    eps = dx * dx

    plus, lead = _as_lines(split.plus)
    minus, _ = _as_lines(split.minus)
    length = plus.shape[1]
    n = _check_padding(length, ghost, 3, 3)

    out = _convection_windows(plus, ghost - 3, n + 1, eps)
    if np.any(minus):
        rev = np.ascontiguousarray(minus[:, ::-1])
        windows = length - 4
        out = out + _convection_windows(rev, windows - 1 - (ghost + n - 2), n + 1, eps)[:, ::-1]
    return HalfPointFlux(np.ascontiguousarray(out).reshape(lead + (n + 1,)))


def convection_rhs(u, f: Callable, fprime_bound=None, dx: float = 1.0, ghost: int = GHOST):
    """-(F_{i+1/2} - F_{i-1/2}) / dx at interior nodes."""
    u = np.asarray(u, dtype=float)
    flux = convection_flux(u, f, _split_speed(u, f, fprime_bound), dx, ghost).values
    return -(flux[..., 1:] - flux[..., :-1]) / dx
