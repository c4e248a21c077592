"""Offline derivation of the literal constants in ``disperse._constants``.

Run with ``python scripts/derive_constants.py``; requires sympy, which is not a
runtime dependency. The output is pasted into ``src/disperse/_constants.py``.

Two sets of constants are produced:

* Taylor coefficients (in t = lambda*dx) of the big-stencil and substencil
  dispersion kernels. The exponential basis is rewritten in a form that stays
  linearly independent at t = 0, so the expansion is a plain power series.
* Quadratic forms Q_m for the WENO-Z smoothness indicators of the
  polynomial-limit substencil reconstructions.
"""

import sympy as sp

t, s = sp.symbols("t s")
ORDER = 12
HALF = sp.Rational(1, 2)
QUARTER = sp.Rational(1, 4)

K_HYP = (sp.sinh(t / 2) / (t / 2)) ** 3
K_TRIG = (sp.sin(t / 2) / (t / 2)) ** 3


def _series(expr):
    return sp.series(expr, t, 0, ORDER).removeO()


def _basis5():
    # (function, its triple cell average at node s)
    return [
        (sp.Integer(1), sp.Integer(1)),
        (s, s),
        (s**2, s**2 + QUARTER),
        ((sp.sinh(t * s) - t * s) / t**3, (sp.sinh(t * s) * K_HYP - t * s) / t**3),
        (
            (sp.cosh(t * s) - 1 - t**2 * s**2 / 2) / t**4,
            (sp.cosh(t * s) * K_HYP - 1 - t**2 * (s**2 + QUARTER) / 2) / t**4,
        ),
    ]


def _basis7():
    ch, sh, c, sn = sp.cosh(t * s), sp.sinh(t * s), sp.cos(t * s), sp.sin(t * s)
    return _basis5()[:3] + [
        ((sh - sn) / t**3, (sh * K_HYP - sn * K_TRIG) / t**3),
        ((ch + c - 2) / t**4, (ch * K_HYP + c * K_TRIG - 2) / t**4),
        ((sh + sn - 2 * t * s) / t**5, (sh * K_HYP + sn * K_TRIG - 2 * t * s) / t**5),
        (
            (ch - c - t**2 * s**2) / t**6,
            (ch * K_HYP - c * K_TRIG - t**2 * (s**2 + QUARTER)) / t**6,
        ),
    ]


def kernel_series(nodes, basis):
    """Power-series coefficients of the kernel, one list per node."""
    n = len(nodes)
    A = sp.Matrix(n, n, lambda a, k: _series(basis[k][1].subs(s, nodes[a])))
    r = sp.Matrix(
        [
            _series(b[0].subs(s, HALF + 1) - 2 * b[0].subs(s, HALF) + b[0].subs(s, HALF - 1))
            for b in basis
        ]
    )

    def coeff(M, k):
        return M.applyfunc(lambda e: sp.expand(e).coeff(t, k))

    AT = A.T
    inv0 = coeff(AT, 0).inv()
    C = []
    for k in range(ORDER - 2):
        rhs = coeff(r, k)
        for j in range(1, k + 1):
            rhs -= coeff(AT, j) * C[k - j]
        C.append(inv0 * rhs)
    return [[C[k][j] for k in range(ORDER - 2)] for j in range(n)]


def z_form(m):
    """Q_m with beta_m = v^T Q_m v for the degree-4 reconstruction on S_m."""
    v = sp.symbols("v0:5")
    b = sp.symbols("b0:5")
    q = sum(b[k] * s**k for k in range(5))
    # triple average of s^k at node x: E[(x + U1 + U2 + U3)^k]
    u1, u2, u3 = sp.symbols("u1 u2 u3")
    eqs = []
    for j, node in enumerate(range(-2 + m, 3 + m)):
        expr = q.subs(s, node + u1 + u2 + u3)
        for u in (u1, u2, u3):
            expr = sp.integrate(expr, (u, -HALF, HALF))
        eqs.append(sp.Eq(sp.expand(expr), v[j]))
    sol = sp.solve(eqs, b, dict=True)[0]
    qm = q.subs(sol)
    beta = sum(sp.integrate(sp.diff(qm, s, kappa) ** 2, (s, -HALF, HALF)) for kappa in range(1, 5))
    beta = sp.expand(beta)
    return sp.Matrix(5, 5, lambda a, c: sp.diff(beta, v[a], v[c]) / 2)


if __name__ == "__main__":
    for m in range(3):
        print(f"# substencil {m}: coefficients of t^0, t^2, ..., t^8")
        for row in kernel_series([sp.Integer(v) for v in range(-2 + m, 3 + m)], _basis5()):
            print("   ", row[0::2])
    print("# big stencil: coefficients of t^0, t^2, ..., t^8")
    for row in kernel_series([sp.Integer(v) for v in range(-2, 5)], _basis7()):
        print("   ", row[0::2])
    for m in range(3):
        Q = z_form(m)
        print(f"# Q_{m}")
        for a in range(5):
            print("   ", [str(Q[a, c]) for c in range(5)])
