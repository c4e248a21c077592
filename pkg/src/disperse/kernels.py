"""Reconstruction kernels for the exponential-basis dispersion flux.

Everything here works in dimensionless form: the node x_i sits at 0, the grid
spacing is 1 and the only parameter is the tension ``t = lambda * dx``. A
kernel is the coefficient vector that maps triple-cell-averaged nodal values
on a stencil to the second difference

    G(x_{i+1/2}) = h(x_{i+3/2}) - 2 h(x_{i+1/2}) + h(x_{i-1/2})

of the underlying function h, exactly for every h in the approximation space.

Small tensions make the exponential columns nearly collinear with the
polynomial ones, so kernels come either from a truncated Taylor series
(``t < SERIES_THRESHOLD``) or from a linear solve carried out in extended
precision with mpmath.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from . import _constants
from .errors import ConditioningFailure, DegenerateKernel

logger = logging.getLogger(__name__)

SERIES_THRESHOLD = 0.05
SERIES_VALID_MAX = 0.1
RESIDUAL_TOL = 1e-8
CROSS_CHECK_TOL = 1e-8
WORKING_DPS = 40

BIG_NODES = tuple(range(-2, 5))
POLY_IDEAL_WEIGHTS = (4 / 15, 1 / 2, 7 / 30)


class Basis(enum.Enum):
    GAMMA7 = 7  # 1, x, x^2, e^{lx}, e^{-lx}, cos lx, sin lx
    GAMMA5 = 5  # 1, x, x^2, e^{lx}, e^{-lx}

    @property
    def dim(self) -> int:
        return self.value


class KernelPath(enum.Enum):
    LINEAR_SOLVE = "LinearSolve"
    SERIES = "Series"


@dataclass(frozen=True)
class BasisSpec:
    lambda_dx: float
    kind: Basis

    def __post_init__(self):
        if not self.lambda_dx >= 0:
            raise ValueError(f"lambda_dx must be >= 0, got {self.lambda_dx}")


def substencil_nodes(m: int) -> tuple[int, ...]:
    """Node offsets (relative to i) of substencil S_m = {i-2+m, ..., i+2+m}."""
    if m not in (0, 1, 2):
        raise ValueError(f"substencil index must be 0, 1 or 2, got {m}")
    return tuple(range(-2 + m, 3 + m))


# {{{ basis functions


def _hyp_factor(t: float) -> float:
    # (sinh(t/2) / (t/2))^3, the triple-average factor of e^{+-t s}
    if t == 0:
        return 1.0
    return (np.sinh(t / 2) / (t / 2)) ** 3


def _trig_factor(t: float) -> float:
    if t == 0:
        return 1.0
    return (np.sin(t / 2) / (t / 2)) ** 3


def averaged_basis(basis: BasisSpec, node_offset: int, fn_index: int) -> float:
    """Triple cell average of basis function ``fn_index`` at node ``node_offset``.

    The average is (1/dx^3) times the nested integral of h over three
    consecutive unit windows; for polynomials it shifts moments, for
    exponentials and trigonometric functions it multiplies by a constant
    factor.
    """
    if not 0 <= fn_index < basis.kind.dim:
        raise ValueError(f"fn_index {fn_index} outside basis of dimension {basis.kind.dim}")
    if abs(node_offset) > 4:
        raise ValueError(f"node_offset must satisfy |offset| <= 4, got {node_offset}")

    t = float(basis.lambda_dx)
    s = float(node_offset)
    if fn_index == 0:
        return 1.0
    if fn_index == 1:
        return s
    if fn_index == 2:
        return s * s + 0.25
    if fn_index == 3:
        return np.exp(t * s) * _hyp_factor(t)
    if fn_index == 4:
        return np.exp(-t * s) * _hyp_factor(t)
    if fn_index == 5:
        return np.cos(t * s) * _trig_factor(t)
    return np.sin(t * s) * _trig_factor(t)


def _mp_avg(k: int, s, t):
    if k == 0:
        return mpmath.mpf(1)
    if k == 1:
        return mpmath.mpf(s)
    if k == 2:
        return mpmath.mpf(s) ** 2 + mpmath.mpf(1) / 4
    if k in (3, 4):
        factor = (mpmath.sinh(t / 2) / (t / 2)) ** 3
        return mpmath.exp((t if k == 3 else -t) * s) * factor
    factor = (mpmath.sin(t / 2) / (t / 2)) ** 3
    return (mpmath.cos(t * s) if k == 5 else mpmath.sin(t * s)) * factor


def _mp_value(k: int, s, t):
    return [
        lambda: mpmath.mpf(1),
        lambda: s,
        lambda: s * s,
        lambda: mpmath.exp(t * s),
        lambda: mpmath.exp(-t * s),
        lambda: mpmath.cos(t * s),
        lambda: mpmath.sin(t * s),
    ][k]()


# }}}


# {{{ linear-solve path


def _mp_kernel(nodes: tuple[int, ...], t: float, dps: int) -> tuple[list, float]:
    n = len(nodes)
    with mpmath.workdps(dps):
        tt = mpmath.mpf(t)
        half = mpmath.mpf(1) / 2
        A = mpmath.matrix(n, n)
        for a, s in enumerate(nodes):
            for k in range(n):
                A[a, k] = _mp_avg(k, s, tt)
        rhs = mpmath.matrix(
            [
                _mp_value(k, half + 1, tt) - 2 * _mp_value(k, half, tt) + _mp_value(k, half - 1, tt)
                for k in range(n)
            ]
        )
        try:
            coeffs = mpmath.lu_solve(A.T, rhs)
        except ZeroDivisionError as exc:
            raise ConditioningFailure(f"singular kernel system at lambda_dx={t}") from exc

        res = A.T * coeffs - rhs
        scale = mpmath.mnorm(A, 1) * mpmath.norm(coeffs, mpmath.inf) + mpmath.norm(rhs, mpmath.inf)
        residual = float(mpmath.norm(res, mpmath.inf) / scale)
        return [coeffs[j] for j in range(n)], residual


def _solve_kernel(nodes: tuple[int, ...], lambda_dx: float) -> np.ndarray:
    if not 0 < lambda_dx <= 1:
        raise ValueError(f"linear solve needs 0 < lambda_dx <= 1, got {lambda_dx}")

    coeffs, residual = _mp_kernel(nodes, lambda_dx, WORKING_DPS)
    # iterative-refinement style check: the same system at twice the precision
    reference, _ = _mp_kernel(nodes, lambda_dx, 2 * WORKING_DPS)
    with mpmath.workdps(2 * WORKING_DPS):
        gap = max(abs(a - b) for a, b in zip(coeffs, reference))
        size = max(abs(b) for b in reference)
        drift = float(gap / size)

    if residual > RESIDUAL_TOL or drift > RESIDUAL_TOL:
        raise ConditioningFailure(
            f"kernel solve at lambda_dx={lambda_dx}: residual {residual:.3e}, "
            f"precision drift {drift:.3e}"
        )
    return np.array([float(c) for c in coeffs])


def solve_big_stencil(lambda_dx: float) -> np.ndarray:
    """Seven-point kernel C_0..C_6 on {i-2, ..., i+4} for the space Gamma7."""
    return _solve_kernel(BIG_NODES, lambda_dx)


def solve_substencil(lambda_dx: float, m: int) -> np.ndarray:
    """Five-point kernel C_0^m..C_4^m on S_m for the space Gamma5."""
    return _solve_kernel(substencil_nodes(m), lambda_dx)


# }}}


# {{{ series path


def series_big_stencil(lambda_dx: float) -> np.ndarray:
    if lambda_dx < 0:
        raise ValueError(f"lambda_dx must be >= 0, got {lambda_dx}")
    t4 = float(lambda_dx) ** 4
    return np.array([float(a) + float(b) * t4 for a, b in zip(_constants.BIG0, _constants.BIG4)])


def series_substencil(lambda_dx: float, m: int) -> np.ndarray:
    if lambda_dx < 0:
        raise ValueError(f"lambda_dx must be >= 0, got {lambda_dx}")
    substencil_nodes(m)
    t2 = float(lambda_dx) ** 2
    return np.array(
        [
            float(a) + float(b) * t2 + float(c) * t2 * t2
            for a, b, c in zip(_constants.SUB0[m], _constants.SUB2[m], _constants.SUB4[m])
        ]
    )


# }}}


# {{{ ideal weights


def ideal_weights(big: np.ndarray, sub: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Weights d_m with sum_m d_m C^m (aligned to the big stencil) = C.

    Only the first three big-stencil entries are used to determine the
    weights; the other four must then hold automatically.
    """
    big = np.asarray(big, dtype=float)
    sub = np.asarray(sub, dtype=float)
    for m in range(3):
        if abs(sub[m, 0]) < tol:
            raise DegenerateKernel(f"leading coefficient of substencil {m} is {sub[m, 0]:.3e}")

    d0 = big[0] / sub[0, 0]
    d1 = (big[1] - d0 * sub[0, 1]) / sub[1, 0]
    d2 = (big[2] - d0 * sub[0, 2] - d1 * sub[1, 1]) / sub[2, 0]
    d = np.array([d0, d1, d2])

    residual = matching_residual(big, sub, d)
    logger.debug("ideal weights %s, matching residual %.3e", d, residual)
    return d


def combine_substencils(sub: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Seven-point kernel equivalent to sum_m d_m C^m."""
    out = np.zeros(7)
    for m in range(3):
        out[m : m + 5] += d[m] * np.asarray(sub[m])
    return out


def matching_residual(big: np.ndarray, sub: np.ndarray, d: np.ndarray) -> float:
    """Largest mismatch between the big kernel and the weighted substencils."""
    return float(np.max(np.abs(combine_substencils(sub, d) - np.asarray(big))))


# }}}


# {{{ undivided differences and WENO-Z forms


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rhs)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col] / aug[col][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] / aug[r][r] for r in range(n)]


@lru_cache(maxsize=None)
def _ud_exact(m: int, n: int) -> tuple[Fraction, ...]:
    offsets = [Fraction(2 * j - 1, 2) for j in substencil_nodes(m)]
    factorial = [1, 1, 2, 6, 24]
    V = [[s**l / factorial[l] for s in offsets] for l in range(5)]
    delta = [Fraction(int(l == n)) for l in range(5)]
    return tuple(_solve_exact(V, delta))


def ud_coeffs(m: int, n: int) -> np.ndarray:
    """Generalized undivided difference of order ``n`` on S_m about x_{i+1/2}.

    Applied to samples g(x_j), the result approximates dx^n g^{(n)}(x_{i+1/2}).
    """
    if n not in (3, 4):
        raise ValueError(f"derivative order must be 3 or 4, got {n}")
    return np.array([float(a) for a in _ud_exact(m, n)])


def z_indicator_forms() -> np.ndarray:
    """Quadratic forms Q_m, shape (3, 5, 5), with beta^Z_m = v^T Q_m v."""
    return np.array([[[float(q) for q in row] for row in Q] for Q in _constants.Z_FORMS])


# }}}


# {{{ kernel table


@dataclass(frozen=True)
class KernelTable:
    lambda_dx: float
    big_coeffs: np.ndarray
    sub_coeffs: np.ndarray
    ideal_weights: np.ndarray
    ud3_coeffs: np.ndarray
    ud4_coeffs: np.ndarray
    z_forms: np.ndarray
    path: KernelPath
    matching_residual: float = 0.0
    series_gap: float | None = None

    def __post_init__(self):
        for name in ("big_coeffs", "sub_coeffs", "ideal_weights", "ud3_coeffs", "ud4_coeffs", "z_forms"):
            getattr(self, name).setflags(write=False)


def _kernels_by_solve(lambda_dx: float) -> tuple[np.ndarray, np.ndarray]:
    big = solve_big_stencil(lambda_dx)
    sub = np.array([solve_substencil(lambda_dx, m) for m in range(3)])
    return big, sub


def _kernels_by_series(lambda_dx: float) -> tuple[np.ndarray, np.ndarray]:
    if lambda_dx > SERIES_VALID_MAX:
        raise ConditioningFailure(f"series kernels are not valid at lambda_dx={lambda_dx}")
    big = series_big_stencil(lambda_dx)
    sub = np.array([series_substencil(lambda_dx, m) for m in range(3)])
    return big, sub


def check_table(table: KernelTable, tol: float = 1e-12) -> None:
    """Raise ``ConditioningFailure`` if any kernel invariant is violated."""
    big, sub, d = table.big_coeffs, table.sub_coeffs, table.ideal_weights
    scale = np.max(np.abs(big))
    problems = []
    if abs(big.sum()) > tol * scale:
        problems.append(f"big stencil sum {big.sum():.3e}")
    if abs(big @ np.array(BIG_NODES, dtype=float)) > tol * 10 * scale:
        problems.append("big stencil does not annihilate linear data")
    for m in range(3):
        nodes = np.array(substencil_nodes(m), dtype=float)
        if abs(sub[m].sum()) > tol * np.max(np.abs(sub[m])):
            problems.append(f"substencil {m} sum {sub[m].sum():.3e}")
        if abs(sub[m] @ nodes) > tol * 10 * np.max(np.abs(sub[m])):
            problems.append(f"substencil {m} does not annihilate linear data")
    if abs(d.sum() - 1) > tol:
        problems.append(f"ideal weights sum to {d.sum()!r}")
    if np.any(d <= 0):
        problems.append(f"non-positive ideal weight {d}")
    for Q in table.z_forms:
        if np.min(np.linalg.eigvalsh(Q)) < -1e-10 * np.max(np.abs(Q)):
            problems.append("indefinite WENO-Z form")
    if problems:
        raise ConditioningFailure(f"kernel table at lambda_dx={table.lambda_dx}: " + "; ".join(problems))


def _assemble(lambda_dx: float, big, sub, path: KernelPath, series_gap=None) -> KernelTable:
    d = ideal_weights(big, sub)
    table = KernelTable(
        lambda_dx=float(lambda_dx),
        big_coeffs=np.asarray(big, dtype=float),
        sub_coeffs=np.asarray(sub, dtype=float),
        ideal_weights=d,
        ud3_coeffs=np.array([ud_coeffs(m, 3) for m in range(3)]),
        ud4_coeffs=np.array([ud_coeffs(m, 4) for m in range(3)]),
        z_forms=z_indicator_forms(),
        path=path,
        matching_residual=matching_residual(big, sub, d),
        series_gap=series_gap,
    )
    # truncated series are consistent only to their neglected O(t^6) terms
    check_table(table, tol=1e-12 if path is KernelPath.LINEAR_SOLVE or lambda_dx == 0 else 1e-9)
    return table


@lru_cache(maxsize=64)
def build_kernel_table(lambda_dx: float) -> KernelTable:
    """Every lambda*dx-dependent constant the scheme needs, computed once."""
    lambda_dx = float(lambda_dx)
    if not 0 <= lambda_dx <= 1:
        raise ValueError(f"lambda_dx must lie in [0, 1], got {lambda_dx}")

    if lambda_dx < SERIES_THRESHOLD:
        order = [KernelPath.SERIES, KernelPath.LINEAR_SOLVE]
    else:
        order = [KernelPath.LINEAR_SOLVE, KernelPath.SERIES]
    if lambda_dx == 0:
        order = [KernelPath.SERIES]

    failures = []
    for path in order:
        try:
            if path is KernelPath.SERIES:
                big, sub = _kernels_by_series(lambda_dx)
                return _assemble(lambda_dx, big, sub, path)

            big, sub = _kernels_by_solve(lambda_dx)
            gap = None
            if lambda_dx <= SERIES_VALID_MAX:
                sbig, ssub = _kernels_by_series(lambda_dx)
                gap = max(np.max(np.abs(big - sbig)), np.max(np.abs(sub - ssub)))
                if gap > CROSS_CHECK_TOL:
                    logger.warning(
                        "series and linear-solve kernels differ by %.3e at lambda_dx=%g",
                        gap,
                        lambda_dx,
                    )
            return _assemble(lambda_dx, big, sub, path, series_gap=gap)
        except ConditioningFailure as exc:
            logger.info("kernel path %s failed: %s", path.value, exc)
            failures.append(exc)

    raise ConditioningFailure("; ".join(str(f) for f in failures))


# }}}
