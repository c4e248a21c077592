"""Command-line front end: ``disperse {run,convergence,sweep,kernels}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DisperseError, NonFiniteState, RefusesWithoutExact, UnknownProblem
from .kernels import build_kernel_table
from .problems import PROBLEM_NAMES, catalog
from .solver import RunConfig, RunResult, convergence_study, lambda_category, lambda_sweep, run

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTIONS = {
    "airy1d": [10, 20, 40, 80, 160, 320],
    "linear2d": [10, 20, 40, 80],
    "kdv_soliton": [80, 160, 320, 640, 1280],
    "k22_travel": [40, 80, 160, 320, 640, 1280],
}
DEFAULT_SWEEP_LAMBDAS = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
DEFAULT_SWEEP_RESOLUTIONS = [10, 20, 40, 80, 160, 320, 640]

# config-file keys and how to parse them
CONFIG_KEYS = {
    "problem": str,
    "scheme": str,
    "lambda_dx": float,
    "n": int,
    "nx": int,
    "ny": int,
    "t": float,
    "cfl": float,
    "fixed_dt": float,
    "snapshots": str,
    "resolutions": str,
    "lambda_grid": str,
    "out_dir": str,
}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """17 significant digits, locale independent; empty for missing values."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def _float_list(text: str | None, name: str) -> list[float]:
    if text is None:
        return []
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise UsageError(f"--{name} expects a comma-separated list of numbers, got {text!r}") from None


def _int_list(text: str | None, name: str) -> list[int]:
    values = _float_list(text, name)
    if any(v != int(v) or v < 1 for v in values):
        raise UsageError(f"--{name} expects positive integers, got {text!r}")
    return [int(v) for v in values]


def read_config(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        try:
            file_values = read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        for key, value in file_values.items():
            if getattr(args, key, None) is None:
                setattr(args, key, value)
    return args


def _check_problem(name: str | None):
    if name is None:
        raise UsageError("--problem is required")
    try:
        return catalog(name)
    except UnknownProblem as exc:
        raise UsageError(str(exc)) from None


def _run_config(args) -> RunConfig:
    spec = _check_problem(args.problem)
    for name in ("n", "nx", "ny"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            raise UsageError(f"--{name} must be a positive integer, got {value}")
    try:
        return RunConfig(
            problem=spec.name,
            scheme=args.scheme or "e",
            lambda_dx=0.02 if args.lambda_dx is None else args.lambda_dx,
            n=getattr(args, "n", None),
            nx=getattr(args, "nx", None),
            ny=getattr(args, "ny", None),
            cfl=0.3 if args.cfl is None else args.cfl,
            fixed_dt=args.fixed_dt,
            final_time=getattr(args, "t", None),
            snapshot_times=tuple(_float_list(getattr(args, "snapshots", None), "snapshots")),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _out_dir(args) -> Path:
    path = Path(args.out_dir or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def _write_manifest(path: Path, payload: dict) -> None:
    payload = {
        "versions": {"disperse": __version__, "numpy": np.__version__, "python": platform.python_version()},
        **payload,
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _solution_rows(result: RunResult, u: np.ndarray, exact: np.ndarray | None):
    if result.y is None:
        cols = [result.x, u]
    else:
        X, Y = np.meshgrid(result.x, result.y)
        cols = [X.ravel(), Y.ravel(), u.ravel()]
    if exact is not None:
        ex = exact.ravel()
        cols += [ex, np.abs(u.ravel() - ex)]
    return zip(*cols)


def _solution_header(result: RunResult, with_exact: bool) -> list[str]:
    header = ["x"] if result.y is None else ["x", "y"]
    header.append("u_numeric")
    if with_exact:
        header += ["u_exact", "abs_error"]
    return header


def _snapshot_name(t: float) -> str:
    return f"snapshot_t{t:g}.csv"


# {{{ subcommands


def cmd_run(args) -> int:
    config = _run_config(args)
    out = _out_dir(args)
    spec = catalog(config.problem)
    started = time.perf_counter()
    try:
        result = run(config)
    except NonFiniteState as exc:
        print(f"blowup t={exc.t:.17g} step={exc.step}")
        _write_manifest(
            out / "manifest.json",
            {"config": config.to_dict(), "status": "blowup", "blowup": {"t": exc.t, "step": exc.step}},
        )
        return 3

    _write_csv(out / "solution.csv", _solution_header(result, result.exact is not None),
               _solution_rows(result, result.final, result.exact))
    files = ["solution.csv"]
    for t, u in sorted(result.snapshots.items()):
        exact = None
        if spec.exact is not None and spec.dim == 1:
            exact = spec.exact(result.x, t)
        elif spec.exact is not None:
            X, Y = np.meshgrid(result.x, result.y)
            exact = spec.exact(X, Y, t)
        name = _snapshot_name(t)
        _write_csv(out / name, _solution_header(result, exact is not None), _solution_rows(result, u, exact))
        files.append(name)

    payload = {
        "config": config.to_dict(),
        "status": "ok",
        "steps": result.steps,
        "final_time": result.t,
        "kernel_path": result.kernel_path,
        "timings": {"integration_s": result.wall_time, "total_s": time.perf_counter() - started},
        "mass_drift": float(abs(result.mass[-1] - result.mass[0])),
        "files": files,
    }
    if result.norms is not None:
        payload["norms"] = {"linf": result.norms.linf, "l1": result.norms.l1}
        print(f"linf={result.norms.linf:.4e} l1={result.norms.l1:.4e}")
    print(f"steps={result.steps} t={result.t:g} wrote {len(files)} file(s) to {out}")
    _write_manifest(out / "manifest.json", payload)

    if args.plot:
        from .plotting import plot_solution

        plot_solution(result, spec, out / "solution.svg")
    return 0


def _resolutions(args, default: list[int]) -> list[int]:
    if args.resolutions is None:
        return default
    values = _int_list(args.resolutions, "resolutions")
    if not values:
        raise UsageError("--resolutions must list at least one grid size")
    return values


def cmd_convergence(args) -> int:
    config = _run_config(args)
    spec = catalog(config.problem)
    if spec.exact is None:
        raise RefusesWithoutExact(f"problem {spec.name} has no exact solution; convergence is undefined")
    resolutions = _resolutions(args, DEFAULT_RESOLUTIONS.get(spec.name, [20, 40, 80, 160]))
    out = _out_dir(args)
    started = time.perf_counter()
    rows = convergence_study(config, resolutions)

    _write_csv(out / "convergence.csv", ["N", "linf", "linf_rate", "l1", "l1_rate"],
               [(r.n, r.linf, r.linf_rate, r.l1, r.l1_rate) for r in rows])
    label = "WENO-Z" if config.scheme == "Z" else f"WENO-E-{config.lambda_dx:g}"
    print(f"{spec.name} {label}")
    print(f"{'N':>6} {'Linf':>12} {'rate':>8} {'L1':>12} {'rate':>8}")
    for r in rows:
        lr = "-" if r.linf_rate is None else f"{r.linf_rate:.4f}"
        l1r = "-" if r.l1_rate is None else f"{r.l1_rate:.4f}"
        print(f"{r.n:>6} {r.linf:>12.4e} {lr:>8} {r.l1:>12.4e} {l1r:>8}")
    _write_manifest(out / "manifest.json", {
        "config": config.to_dict(),
        "resolutions": resolutions,
        "timings": {"total_s": time.perf_counter() - started},
        "files": ["convergence.csv"],
    })
    if args.plot:
        from .plotting import plot_convergence

        plot_convergence(rows, label, out / "convergence.svg")
    return 0


def cmd_sweep(args) -> int:
    spec = _check_problem(args.problem)
    if spec.exact is None:
        raise RefusesWithoutExact(f"problem {spec.name} has no exact solution; a sweep is undefined")
    resolutions = _resolutions(args, DEFAULT_SWEEP_RESOLUTIONS)
    lambdas = _float_list(args.lambda_grid, "lambda-grid") if args.lambda_grid else DEFAULT_SWEEP_LAMBDAS
    if not lambdas:
        raise UsageError("--lambda-grid must list at least one value")
    if any(not 0 <= v <= 1 for v in lambdas):
        raise UsageError("--lambda-grid values must lie in [0, 1]")
    overrides = {}
    if args.cfl is not None:
        overrides["cfl"] = args.cfl
    if args.t is not None:
        overrides["final_time"] = args.t
    out = _out_dir(args)
    started = time.perf_counter()
    result = lambda_sweep(spec.name, resolutions, lambdas, **overrides)

    header = ["lambda_dx", "category"] + [f"N={n}" for n in resolutions]
    _write_csv(out / "sweep.csv", header,
               [[lam, lambda_category(lam)] + list(row) for lam, row in zip(lambdas, result.l1)])
    print(f"{'lambda_dx':>9} {'cat':>3} " + " ".join(f"{'N=' + str(n):>11}" for n in resolutions))
    for lam, row in zip(lambdas, result.l1):
        print(f"{lam:>9g} {lambda_category(lam):>3} " + " ".join(f"{v:>11.4e}" for v in row))
    for lam, n, t, step in result.blowups:
        print(f"blowup lambda_dx={lam:g} N={n} t={t:.17g} step={step}")
    _write_manifest(out / "manifest.json", {
        "problem": spec.name,
        "lambda_grid": lambdas,
        "resolutions": resolutions,
        "overrides": overrides,
        "blowups": [{"lambda_dx": lam, "n": n, "t": t, "step": s} for lam, n, t, s in result.blowups],
        "timings": {"total_s": time.perf_counter() - started},
        "files": ["sweep.csv"],
    })
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(result, out / "sweep.svg")
    return 0


def cmd_kernels(args) -> int:
    lam = 0.0 if args.lambda_dx is None else args.lambda_dx
    if not 0 <= lam <= 1:
        raise UsageError(f"--lambda-dx must lie in [0, 1], got {lam}")
    table = build_kernel_table(lam)
    rows = []
    rows += [("C", j, v) for j, v in enumerate(table.big_coeffs)]
    rows += [(f"C{m}", j, v) for m in range(3) for j, v in enumerate(table.sub_coeffs[m])]
    rows += [("d", m, v) for m, v in enumerate(table.ideal_weights)]
    rows += [(f"D3_{m}", j, v) for m in range(3) for j, v in enumerate(table.ud3_coeffs[m])]
    rows += [(f"D4_{m}", j, v) for m in range(3) for j, v in enumerate(table.ud4_coeffs[m])]
    rows += [(f"Q{m}", 5 * a + b, table.z_forms[m, a, b]) for m in range(3) for a in range(5) for b in range(5)]

    out = _out_dir(args)
    _write_csv(out / "kernels.csv", ["name", "index", "value"], [(n, str(i), v) for n, i, v in rows])
    print(f"lambda_dx={lam:g} path={table.path.value}")
    print("C  " + " ".join(fmt(v) for v in table.big_coeffs))
    print("d  " + " ".join(fmt(v) for v in table.ideal_weights))
    return 0


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disperse",
        description="WENO-E / WENO-Z solver for u_t + f(u)_x + g(u)_xxx = 0",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, grid=True, time_flags=True):
        p.add_argument("--problem", choices=PROBLEM_NAMES, help="benchmark problem")
        p.add_argument("--scheme", type=str.lower, choices=("e", "z"), help="dispersion flux (default e)")
        p.add_argument("--lambda-dx", type=float, help="tension parameter lambda*dx (default 0.02)")
        if grid:
            p.add_argument("--n", type=int, help="node count (1D, or both axes in 2D)")
            p.add_argument("--nx", type=int, help="x node count for 2D problems")
            p.add_argument("--ny", type=int, help="y node count for 2D problems")
        if time_flags:
            p.add_argument("--t", type=float, help="final time (default from the catalog)")
            p.add_argument("--cfl", type=float, help="CFL number (default 0.3)")
            p.add_argument("--fixed-dt", type=float, help="constant time step, bypassing the CFL rule")
        p.add_argument("--out-dir", help="directory for CSV and manifest output (default .)")
        p.add_argument("--config", help="file of 'key = value' lines; flags take precedence")
        p.add_argument("--plot", action="store_true", help="also write SVG line plots (needs matplotlib)")

    p = sub.add_parser("run", help="integrate one problem and write the solution")
    common(p)
    p.add_argument("--snapshots", help="comma-separated output times")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("convergence", help="error norms and observed orders over a grid ladder")
    common(p, grid=False)
    p.add_argument("--resolutions", help="comma-separated node counts")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("sweep", help="L1 error matrix over lambda*dx and N for WENO-E")
    common(p, grid=False)
    p.add_argument("--resolutions", help="comma-separated node counts")
    p.add_argument("--lambda-grid", help="comma-separated lambda*dx values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("kernels", help="dump the kernel table for one lambda*dx")
    p.add_argument("--lambda-dx", type=float, help="tension parameter (default 0)")
    p.add_argument("--out-dir", help="directory for kernels.csv (default .)")
    p.add_argument("--config", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_kernels)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args = _merge_config(args)
        return args.func(args)
    except (UsageError, RefusesWithoutExact) as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except DisperseError as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
