"""Grids, ghost cells, the 1D/2D method-of-lines drivers and refinement studies."""

from __future__ import annotations

import concurrent.futures
import logging
import math
import os
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import NonFiniteState, RefusesWithoutExact
from .flux1d import GHOST, convection_rhs, dispersion_rhs
from .kernels import build_kernel_table
from .problems import Boundary, ErrorNorms, ProblemSpec, catalog, error_norms
from .timestepper import StepController, ssp_rk3_step
from .weights import Scheme

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grid1D:
    """N nodes x_i = xl + i dx, i = 0..N-1, with dx = (xr - xl) / N."""

    xl: float
    xr: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"node count must be positive, got {self.n}")
        if not self.xr > self.xl:
            raise ValueError(f"empty interval [{self.xl}, {self.xr}]")

    @property
    def dx(self) -> float:
        return (self.xr - self.xl) / self.n

    @property
    def nodes(self) -> np.ndarray:
        return self.xl + self.dx * np.arange(self.n)

    @property
    def closed_nodes(self) -> np.ndarray:
        """The nodes plus the right endpoint x_N = xr."""
        return self.xl + self.dx * np.arange(self.n + 1)


@dataclass(frozen=True)
class Grid2D:
    x: Grid1D
    y: Grid1D

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) with shape (ny, nx); the last axis runs along x."""
        return np.meshgrid(self.x.nodes, self.y.nodes)


@dataclass(frozen=True)
class RunConfig:
    problem: str
    scheme: str = "E"
    lambda_dx: float = 0.02
    n: int | None = None
    nx: int | None = None
    ny: int | None = None
    cfl: float = 0.3
    fixed_dt: float | None = None
    final_time: float | None = None
    snapshot_times: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme).value)
        object.__setattr__(self, "snapshot_times", tuple(float(s) for s in self.snapshot_times))
        if not 0 <= self.lambda_dx <= 1:
            raise ValueError(f"lambda_dx must lie in [0, 1], got {self.lambda_dx}")
        for name in ("n", "nx", "ny"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value}")
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.final_time is not None and self.final_time < 0:
            raise ValueError(f"final time must be >= 0, got {self.final_time}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["snapshot_times"] = list(self.snapshot_times)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(**{**d, "snapshot_times": tuple(d.get("snapshot_times", ()))})


@dataclass
class RunResult:
    config: RunConfig
    x: np.ndarray
    y: np.ndarray | None
    final: np.ndarray
    t: float
    steps: int
    snapshots: dict = field(default_factory=dict)
    norms: ErrorNorms | None = None
    exact: np.ndarray | None = None
    mass: np.ndarray | None = None
    wall_time: float = 0.0
    kernel_path: str = ""


def kernel_table_for(scheme, lambda_dx: float):
    # WENO-Z is the polynomial limit of the same kernels
    if Scheme.parse(scheme) is Scheme.Z:
        return build_kernel_table(0.0)
    return build_kernel_table(lambda_dx)


def fill_ghosts(u: np.ndarray, bc: Boundary, ghost: int = GHOST) -> np.ndarray:
    """Pad every axis with ``ghost`` cells: wrap-around or constant extrapolation."""
    periodic = bc is Boundary.PERIODIC
    if periodic and min(u.shape) < ghost:
        raise ValueError(f"periodic padding needs at least {ghost} nodes per axis, got {u.shape}")
    if u.ndim == 1:
        # hot path of every 1D right-hand side evaluation
        if periodic:
            return np.concatenate((u[-ghost:], u, u[:ghost]))
        return np.concatenate((np.full(ghost, u[0]), u, np.full(ghost, u[-1])))
    return np.pad(u, ghost, mode="wrap" if periodic else "edge")


def _resolve(config: RunConfig, problem: ProblemSpec | None) -> tuple[ProblemSpec, float]:
    spec = problem if problem is not None else catalog(config.problem)
    T = spec.default_T if config.final_time is None else config.final_time
    return spec, float(T)


def _max_speed(flux, u) -> float:
    return 0.0 if flux is None else flux.max_speed(u)


def _integrate(u, rhs, speeds, dx, config, spec, T, measure):
    fixed_dt = config.fixed_dt
    if fixed_dt is None and spec.fixed_dt_coeff is not None:
        fixed_dt = spec.fixed_dt_coeff * dx**3
    ctl = StepController(T=T, cfl=config.cfl, fixed_dt=fixed_dt, checkpoints=config.snapshot_times)

    snapshots = {}
    if 0.0 in config.snapshot_times:
        snapshots[0.0] = u.copy()
    mass = [measure(u)]
    steps = 0
    while not ctl.done:
        fmax, gmax = speeds(u)
        dt = ctl.propose(fmax, gmax, dx)
        try:
            u = ssp_rk3_step(u, rhs, dt)
        except NonFiniteState as exc:
            raise NonFiniteState(
                f"non-finite state at t={ctl.t + dt:.6g}, step {steps + 1}", t=ctl.t + dt, step=steps + 1
            ) from exc
        steps += 1
        t = ctl.advance(dt)
        mass.append(measure(u))
        if t in config.snapshot_times:
            snapshots[t] = u.copy()
    if T in config.snapshot_times:
        snapshots[T] = u.copy()
    return u, steps, snapshots, np.array(mass)


def run_1d(config: RunConfig, problem: ProblemSpec | None = None) -> RunResult:
    spec, T = _resolve(config, problem)
    if spec.dim != 1:
        raise ValueError(f"problem {spec.name} is {spec.dim}D; use run_2d")
    (xl, xr), = spec.domain
    grid = Grid1D(xl, xr, config.n or spec.default_n)
    dx = grid.dx
    table = kernel_table_for(config.scheme, config.lambda_dx)
    scheme = config.scheme

    def rhs(u):
        up = fill_ghosts(u, spec.bc)
        out = dispersion_rhs(up, spec.g, table, dx, scheme, alpha=spec.g.max_speed(up))
        if spec.f is not None:
            out += convection_rhs(up, spec.f, spec.f.max_speed(up), dx)
        return out

    def speeds(u):
        return _max_speed(spec.f, u), _max_speed(spec.g, u)

    start = time.perf_counter()
    u0 = np.asarray(spec.ic(grid.nodes), dtype=float)
    u, steps, snapshots, mass = _integrate(u0, rhs, speeds, dx, config, spec, T, lambda v: float(v.sum() * dx))
    wall = time.perf_counter() - start

    norms = exact = None
    if spec.exact is not None:
        norms, exact = _norms_1d(grid, u, spec, T)
    return RunResult(config, grid.nodes, None, u, T, steps, snapshots, norms, exact, mass, wall, table.path.value)


def _norms_1d(grid: Grid1D, u: np.ndarray, spec: ProblemSpec, T: float):
    # norms run over x_0..x_N; on a periodic grid u(x_N) = u(x_0)
    x = grid.closed_nodes
    numeric = np.append(u, u[0]) if spec.bc is Boundary.PERIODIC else u
    if spec.bc is not Boundary.PERIODIC:
        x = grid.nodes
    exact = spec.exact(x, T)
    mask = np.ones(x.shape, dtype=bool)
    if spec.error_window is not None:
        lo, hi = spec.error_window
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        mask = (x >= lo - tol) & (x <= hi + tol)
    return error_norms(numeric[mask], exact[mask]), exact[: grid.n]


def run_2d(config: RunConfig, problem: ProblemSpec | None = None) -> RunResult:
    spec, T = _resolve(config, problem)
    if spec.dim != 2:
        raise ValueError(f"problem {spec.name} is {spec.dim}D; use run_1d")
    (xl, xr), (yl, yr) = spec.domain
    nx = config.nx or config.n or spec.default_n
    ny = config.ny or config.n or spec.default_n
    grid = Grid2D(Grid1D(xl, xr, nx), Grid1D(yl, yr, ny))
    dx, dy = grid.x.dx, grid.y.dx
    table = kernel_table_for(config.scheme, config.lambda_dx)
    scheme = config.scheme
    g = GHOST

    def rhs(u):
        up = fill_ghosts(u, spec.bc)
        alpha = spec.g.max_speed(up)
        out = dispersion_rhs(up[g:-g, :], spec.g, table, dx, scheme, alpha=alpha)
        out += dispersion_rhs(up[:, g:-g].T, spec.g, table, dy, scheme, alpha=alpha).T
        if spec.f is not None:
            fmax = spec.f.max_speed(up)
            out += convection_rhs(up[g:-g, :], spec.f, fmax, dx)
            out += convection_rhs(up[:, g:-g].T, spec.f, fmax, dy).T
        return out

    def speeds(u):
        return _max_speed(spec.f, u), _max_speed(spec.g, u)

    start = time.perf_counter()
    X, Y = grid.mesh()
    u0 = np.asarray(spec.ic(X, Y), dtype=float)
    u, steps, snapshots, mass = _integrate(
        u0, rhs, speeds, min(dx, dy), config, spec, T, lambda v: float(v.sum() * dx * dy)
    )
    wall = time.perf_counter() - start

    norms = exact = None
    if spec.exact is not None:
        xs, ys = grid.x.closed_nodes, grid.y.closed_nodes
        Xc, Yc = np.meshgrid(xs, ys)
        closed = np.pad(u, ((0, 1), (0, 1)), mode="wrap")
        ex = spec.exact(Xc, Yc, T)
        norms = error_norms(closed, ex)
        exact = ex[:ny, :nx]
    return RunResult(config, grid.x.nodes, grid.y.nodes, u, T, steps, snapshots, norms, exact, mass, wall, table.path.value)


def run(config: RunConfig, problem: ProblemSpec | None = None) -> RunResult:
    spec, _ = _resolve(config, problem)
    return (run_2d if spec.dim == 2 else run_1d)(config, spec)


# {{{ studies


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("DISPERSE_THREADS")
    n = requested or os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            logger.warning("ignoring non-integer DISPERSE_THREADS=%r", cap)
    return max(1, n)


def _safe_run(config: RunConfig):
    try:
        return run(config), None
    except NonFiniteState as exc:
        return None, exc


def run_many(configs: list[RunConfig], workers: int | None = None) -> list:
    """Run configs, possibly concurrently; results come back in input order."""
    workers = min(worker_count(workers), len(configs)) if configs else 1
    if workers <= 1:
        return [_safe_run(c) for c in configs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_safe_run, configs))


@dataclass
class ConvergenceRow:
    n: int
    linf: float
    l1: float
    linf_rate: float | None
    l1_rate: float | None


def observed_rate(e_coarse: float, e_fine: float, n_coarse: int, n_fine: int) -> float | None:
    if n_fine == n_coarse or e_coarse <= 0 or e_fine <= 0:
        return None
    return math.log(e_coarse / e_fine) / math.log(n_fine / n_coarse)


def convergence_study(config: RunConfig, resolutions, workers: int | None = None) -> list[ConvergenceRow]:
    resolutions = [int(n) for n in resolutions]
    if not resolutions:
        raise ValueError("at least one resolution is required")
    spec = catalog(config.problem)
    if spec.exact is None:
        raise RefusesWithoutExact(f"problem {spec.name} has no exact solution to measure errors against")

    field_name = "n"
    configs = [replace(config, **{field_name: n, "nx": None, "ny": None}) for n in resolutions]
    rows = []
    for i, (n, (res, exc)) in enumerate(zip(resolutions, run_many(configs, workers))):
        if exc is not None:
            raise exc
        linf, l1 = res.norms.linf, res.norms.l1
        linf_rate = l1_rate = None
        if i > 0:
            prev = rows[-1]
            linf_rate = observed_rate(prev.linf, linf, prev.n, n)
            l1_rate = observed_rate(prev.l1, l1, prev.n, n)
        rows.append(ConvergenceRow(n, linf, l1, linf_rate, l1_rate))
    return rows


@dataclass
class SweepResult:
    lambda_grid: list
    resolutions: list
    l1: np.ndarray  # rows = lambda_dx, columns = N; inf marks a blow-up
    blowups: list  # (lambda_dx, N, t, step)


def lambda_category(lambda_dx: float) -> str:
    """Grouping of tension values: A = [0.02, 0.04], B = [0.06, 0.1], C = above 0.1."""
    if 0.02 <= lambda_dx <= 0.04 + 1e-12:
        return "A"
    if 0.06 - 1e-12 <= lambda_dx <= 0.1 + 1e-12:
        return "B"
    if lambda_dx > 0.1:
        return "C"
    return "-"


def lambda_sweep(problem: str, resolutions, lambda_grid, workers: int | None = None, **overrides) -> SweepResult:
    spec = catalog(problem)
    if spec.exact is None:
        raise RefusesWithoutExact(f"problem {spec.name} has no exact solution to measure errors against")
    resolutions = [int(n) for n in resolutions]
    lambda_grid = [float(v) for v in lambda_grid]
    configs = [
        RunConfig(problem=problem, scheme="E", lambda_dx=lam, n=n, **overrides)
        for lam in lambda_grid
        for n in resolutions
    ]
    l1 = np.empty((len(lambda_grid), len(resolutions)))
    blowups = []
    for k, (res, exc) in enumerate(run_many(configs, workers)):
        i, j = divmod(k, len(resolutions))
        if exc is None:
            l1[i, j] = res.norms.l1
        else:
            l1[i, j] = np.inf
            blowups.append((lambda_grid[i], resolutions[j], exc.t, exc.step))
    return SweepResult(lambda_grid, resolutions, l1, blowups)


# }}}
