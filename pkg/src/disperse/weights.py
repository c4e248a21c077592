"""Smoothness indicators and nonlinear weights for the WENO-E and WENO-Z fluxes.

The public functions are vectorized: windows carry the stencil along the last
axis (7 values g(u_{i-2})..g(u_{i+4}), or an explicit ``(..., 3, 5)`` stack of
substencil windows) and any leading axes are treated as independent
interfaces. The ``*_scalar`` kernels compute the same formulas for one
interface and are compiled with numba so the flux loops can call them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np


class Scheme(enum.Enum):
    E = "E"
    Z = "Z"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"scheme must be 'e' or 'z', got {value!r}") from None


@dataclass(frozen=True)
class SmoothnessReport:
    beta: np.ndarray
    zeta: np.ndarray
    omega: np.ndarray
    scheme: Scheme


def substencil_windows(window) -> np.ndarray:
    """(..., 7) big-stencil values -> (..., 3, 5) substencil values."""
    window = np.asarray(window, dtype=float)
    if window.shape[-2:] == (3, 5):
        return window
    if window.shape[-1] != 7:
        raise ValueError(f"expected a 7-point window or a (3, 5) stack, got shape {window.shape}")
    return np.stack([window[..., m : m + 5] for m in range(3)], axis=-2)


def betas_E(window, ud3, ud4) -> np.ndarray:
    """beta_m = |D^3_m g| + |D^4_m g| on each substencil."""
    v = substencil_windows(window)
    d3 = np.einsum("...mj,mj->...m", v, np.asarray(ud3))
    d4 = np.einsum("...mj,mj->...m", v, np.asarray(ud4))
    return np.abs(d3) + np.abs(d4)


def betas_Z(window, Q) -> np.ndarray:
    """beta^Z_m = v_m^T Q_m v_m on each substencil."""
    # Q annihilates constants, so centring first only removes rounding noise
    v = substencil_windows(window)
    v = v - v[..., 2:3]
    return np.maximum(np.einsum("...mj,mjl,...ml->...m", v, np.asarray(Q), v), 0.0)


def _normalize(alpha: np.ndarray) -> np.ndarray:
    return alpha / alpha.sum(axis=-1, keepdims=True)


def weights_E(beta, d, dx: float) -> np.ndarray:
    """omega_m proportional to d_m (1 + zeta / (beta_m + dx^2)), zeta = |beta_0 - beta_2|."""
    beta = np.asarray(beta, dtype=float)
    zeta = np.abs(beta[..., 0] - beta[..., 2])[..., None]
    return _normalize(np.asarray(d) * (1.0 + zeta / (beta + dx * dx)))


def weights_Z(beta_z, d, dx: float) -> np.ndarray:
    """Same normalization as ``weights_E`` with tau5 = |beta^Z_0 - beta^Z_2|."""
    return weights_E(beta_z, d, dx)


def smoothness_report(window, table, dx: float, scheme="E") -> SmoothnessReport:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.E:
        beta = betas_E(window, table.ud3_coeffs, table.ud4_coeffs)
    else:
        beta = betas_Z(window, table.z_forms)
    omega = weights_E(beta, table.ideal_weights, dx)
    return SmoothnessReport(beta, np.abs(beta[..., 0] - beta[..., 2]), omega, scheme)


# {{{ scalar kernels for compiled loops


@numba.njit(cache=True, inline="always")
def weights_scalar(b0, b1, b2, d0, d1, d2, eps):
    zeta = abs(b0 - b2)
    a0 = d0 * (1.0 + zeta / (b0 + eps))
    a1 = d1 * (1.0 + zeta / (b1 + eps))
    a2 = d2 * (1.0 + zeta / (b2 + eps))
    s = a0 + a1 + a2
    return a0 / s, a1 / s, a2 / s


# }}}
