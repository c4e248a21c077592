"""Optional SVG line plots; matplotlib is imported only when a plot is requested."""

from __future__ import annotations

import numpy as np


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise RuntimeError("--plot needs matplotlib; install the 'plot' extra") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_solution(result, spec, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    if result.y is None:
        ax.plot(result.x, result.final, label="numeric")
        if result.exact is not None:
            ax.plot(result.x, result.exact, "--", label="exact")
        ax.set_xlabel("x")
        ax.set_ylabel("u")
        ax.legend()
    else:
        # a line along the x axis through the middle row keeps the output a line plot
        mid = len(result.y) // 2
        ax.plot(result.x, result.final[mid], label=f"numeric, y={result.y[mid]:.3g}")
        if result.exact is not None:
            ax.plot(result.x, result.exact[mid], "--", label="exact")
        ax.set_xlabel("x")
        ax.legend()
    ax.set_title(f"{spec.name} at t={result.t:g}")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_convergence(rows, label, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    n = np.array([r.n for r in rows])
    ax.loglog(n, [r.linf for r in rows], "o-", label="L-inf")
    ax.loglog(n, [r.l1 for r in rows], "s-", label="L1")
    ax.set_xlabel("N")
    ax.set_ylabel("error")
    ax.set_title(label)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_sweep(result, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for lam, row in zip(result.lambda_grid, result.l1):
        finite = np.isfinite(row)
        ax.loglog(np.array(result.resolutions)[finite], row[finite], "o-", label=f"{lam:g}")
    ax.set_xlabel("N")
    ax.set_ylabel("L1 error")
    ax.legend(title="lambda*dx", fontsize="small", ncol=2)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
