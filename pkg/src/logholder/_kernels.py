"""Compiled inner loops.

All kernels use the standard step matrix ``[[E - v, -1], [1, 0]]`` and the
site ordering ``A(v[p-1]) ... A(v[0])``. Running products are rescaled so
that periods in the thousands do not overflow; callers receive a mantissa
and a natural-log scale.
"""
import numpy as np
from numba import njit

_RESCALE = 1e150


@njit(cache=True)
def _disc_one(values, E):
    # (M, dM/dE) accumulated together by the product rule
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    da, db, dc, dd = 0.0, 0.0, 0.0, 0.0
    logscale = 0.0
    for n in range(values.shape[0]):
        x = E - values[n]
        # A = [[x, -1], [1, 0]], A' = [[1, 0], [0, 0]]
        na = x * a - c
        nb = x * b - d
        nda = x * da - dc + a
        ndb = x * db - dd + b
        dc, dd = da, db
        c, d = a, b
        a, b = na, nb
        da, db = nda, ndb
        m = max(abs(a), abs(b), abs(c), abs(d))
        if m > _RESCALE:
            a /= m
            b /= m
            c /= m
            d /= m
            da /= m
            db /= m
            dc /= m
            dd /= m
            logscale += np.log(m)
    return a + d, da + dd, logscale


@njit(cache=True)
def discriminant_many(values, energies):
    n = energies.shape[0]
    tr = np.empty(n)
    dtr = np.empty(n)
    ls = np.empty(n)
    for i in range(n):
        tr[i], dtr[i], ls[i] = _disc_one(values, energies[i])
    return tr, dtr, ls


@njit(cache=True)
def _disc_value(values, E):
    t, dt, ls = _disc_one(values, E)
    if ls == 0.0:
        return t, dt
    s = np.exp(ls)
    return t * s, dt * s


@njit(cache=True)
def log_spectral_radius_many(values, energies):
    """log of the monodromy spectral radius; 0 wherever ``|D| <= 2``."""
    n = energies.shape[0]
    out = np.empty(n)
    for i in range(n):
        t, _, ls = _disc_one(values, energies[i])
        if ls == 0.0:
            at = abs(t)
            if at <= 2.0:
                out[i] = 0.0
            else:
                out[i] = np.log((at + np.sqrt((at - 2.0) * (at + 2.0))) / 2.0)
        else:
            at = abs(t)
            # |D| = at * exp(ls) > 1e150, far outside the bands
            r = 4.0 * np.exp(-2.0 * ls)
            out[i] = ls + np.log((at + np.sqrt(at * at - r)) / 2.0)
    return out


@njit(cache=True)
def sturm_count_many(window, energies):
    """Number of Dirichlet eigenvalues strictly below each energy."""
    n = energies.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    N = window.shape[0]
    for i in range(n):
        E = energies[i]
        q = window[0] - E
        if abs(q) < 1e-300:
            q = -1e-300
        k = 1 if q < 0.0 else 0
        for j in range(1, N):
            q = window[j] - E - 1.0 / q
            if abs(q) < 1e-300:
                q = -1e-300
            if q < 0.0:
                k += 1
        counts[i] = k
    return counts


@njit(cache=True)
def bisect_derivative_roots(values, lo, hi, tol):
    """Roots of D' on brackets where D' changes sign; NaN if it does not."""
    n = lo.shape[0]
    out = np.empty(n)
    for i in range(n):
        a = lo[i]
        b = hi[i]
        _, fa = _disc_value(values, a)
        _, fb = _disc_value(values, b)
        if fa == 0.0:
            out[i] = a
            continue
        if fb == 0.0:
            out[i] = b
            continue
        if (fa > 0.0) == (fb > 0.0):
            out[i] = np.nan
            continue
        sa = fa > 0.0
        for _ in range(200):
            if b - a <= tol:
                break
            m = 0.5 * (a + b)
            if m <= a or m >= b:
                break
            _, fm = _disc_value(values, m)
            if fm == 0.0:
                a = m
                b = m
                break
            if (fm > 0.0) == sa:
                a = m
            else:
                b = m
        out[i] = 0.5 * (a + b)
    return out


@njit(cache=True)
def solve_level_many(values, lo, hi, level, tol):
    """Solve ``D(E) = level`` on brackets where D is monotone.

    Safeguarded Newton with bisection fallback; the bracket is kept and the
    loop stops once it is narrower than ``tol``. Returns NaN where there is
    no sign change of ``D - level``.
    """
    n = lo.shape[0]
    out = np.empty(n)
    for i in range(n):
        a = lo[i]
        b = hi[i]
        c = level[i]
        fa = _disc_value(values, a)[0] - c
        fb = _disc_value(values, b)[0] - c
        if fa == 0.0:
            out[i] = a
            continue
        if fb == 0.0:
            out[i] = b
            continue
        if (fa > 0.0) == (fb > 0.0):
            out[i] = np.nan
            continue
        sa = fa > 0.0
        x = 0.5 * (a + b)
        dx_old = b - a
        for _ in range(400):
            f, df = _disc_value(values, x)
            f -= c
            if f == 0.0:
                a = x
                b = x
                break
            if (f > 0.0) == sa:
                a = x
            else:
                b = x
            if b - a <= tol:
                break
            xn = x - f / df if df != 0.0 else np.nan
            if not (a < xn < b) or abs(2.0 * f) > abs(dx_old * df):
                xn = 0.5 * (a + b)
            dx_old = abs(xn - x)
            if dx_old < 0.25 * tol:
                # Newton has converged; confirm by straddling the root
                lo_x = max(a, xn - tol)
                hi_x = min(b, xn + tol)
                flo = _disc_value(values, lo_x)[0] - c
                fhi = _disc_value(values, hi_x)[0] - c
                if (flo > 0.0) == sa and (fhi > 0.0) != sa:
                    a = lo_x
                    b = hi_x
                    break
                xn = 0.5 * (a + b)
            x = xn
        out[i] = 0.5 * (a + b)
    return out
