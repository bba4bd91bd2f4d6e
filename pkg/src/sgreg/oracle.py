"""Extended-precision reference solver for the linear coupled case (gamma = 0).

With no sine term the modes decouple: for each n the pair (u_n, v_n)
solves a 2x2 linear Volterra system.  This module iterates that system with
mpmath, element by element, using the filter in its raw (unrescaled) form
and the same trapezoid rule in x.  It shares no code with ``solver``.
"""

from __future__ import annotations

import mpmath as mp


def _psi(beta, s, k, a, x):
    return mp.exp(-s * (a - x)) / (2 * beta * s**k + 2 * mp.exp(-s * a))


def linear_mode_oracle(
    a,
    alpha,
    lam,
    k,
    beta,
    sigma,
    data,
    forcing,
    n_x,
    dps=30,
    tol=None,
    max_iters=500,
):
    """Solve one mode of the linear system by Picard iteration in ``dps`` digits.

    ``alpha`` is ``(alpha1, alpha2)``, ``data`` is ``(u0, u1, v0, v1)`` for this
    mode, ``forcing`` is a pair of length-``n_x`` sequences (``f1``, ``f2``
    coefficients of this mode at each node).  Returns ``(u, v, iterations)``
    as lists of mpf.
    """
    with mp.workdps(dps):
        a = mp.mpf(a)
        beta = mp.mpf(beta)
        k = mp.mpf(k)
        lam = mp.mpf(lam)
        tol = mp.mpf(10) ** (-(dps - 5)) if tol is None else mp.mpf(tol)
        h = a / (n_x - 1)
        xs = [h * j for j in range(n_x)]
        s = [mp.sqrt(mp.mpf(al) * lam) for al in alpha]
        sg = [[mp.mpf(sigma[i][j]) for j in range(2)] for i in range(2)]
        u0, u1, v0, v1 = (mp.mpf(c) for c in data)
        f = [[mp.mpf(c) for c in forcing[i]] for i in range(2)]

        def coefs(i, x):
            p = _psi(beta, s[i], k, a, x)
            e = mp.exp(-s[i] * x) / 2
            return p + e, (p - e) / s[i]

        base = [[], []]
        kern = [[], []]
        for i, (c0, c1) in enumerate(((u0, u1), (v0, v1))):
            for x in xs:
                A, B = coefs(i, x)
                base[i].append(A * c0 + B * c1)
                kern[i].append(B)

        u = list(base[0])
        v = list(base[1])
        iters = 0
        for iters in range(1, max_iters + 1):
            F = [
                [f[0][l] - sg[0][0] * u[l] - sg[0][1] * v[l] for l in range(n_x)],
                [f[1][l] - sg[1][0] * u[l] - sg[1][1] * v[l] for l in range(n_x)],
            ]
            new = [[], []]
            for i in range(2):
                g = kern[i]
                Fi = F[i]
                for j in range(n_x):
                    if j == 0:
                        acc = mp.mpf(0)
                    else:
                        acc = (g[j] * Fi[0] + g[0] * Fi[j]) / 2
                        for l in range(1, j):
                            acc += g[j - l] * Fi[l]
                        acc *= h
                    new[i].append(base[i][j] + acc)
            diff = max(
                mp.sqrt((new[0][j] - u[j]) ** 2 + (new[1][j] - v[j]) ** 2) for j in range(n_x)
            )
            u, v = new
            if diff <= tol:
                break
        return u, v, iters
