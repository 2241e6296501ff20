"""Lyapunov exponent recovered from the IDS by the Thouless formula.

``L(E) = integral log|E - E'| dk(E')``. On band ``j`` the IDS increases by
``dt / p`` where ``t`` is the band's Floquet angle, so the integral becomes
``(1/p) sum_j integral_0^1 log|E - E_j(t)| dt`` with ``E_j(t)`` the unique
solution of ``D(E) = 2 s_j cos(pi t)`` on the band. ``E_j`` is smooth in
``t`` up to the edges, which removes the inverse square-root density
singularity. When ``E`` lies inside a band the logarithm is split off at
the matching angle and integrated exactly.
"""
import math

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .bands import BandStructure
from .exceptions import InvalidInput, QuadratureFailure
from .transfer import as_potential, discriminant

ACCURACY = 1e-6


def _band_map(v, a, b, s):
    """``t -> E_j(t)`` for the band ``[a, b]`` whose lower edge has ``D = 2s``."""
    lo = np.array([a])
    hi = np.array([b])
    tol = 1e-15 * max(1.0, abs(a), abs(b))

    def E_of_t(t):
        if t <= 0.0:
            return a
        if t >= 1.0:
            return b
        level = np.array([2.0 * s * math.cos(math.pi * t)])
        x = _kernels.solve_level_many(v, lo, hi, level, tol)[0]
        return a if np.isnan(x) else float(x)

    return E_of_t


def _quad(f, a, b, limit):
    if b <= a:
        return 0.0
    val, err, *rest = quad(f, a, b, limit=limit, epsabs=ACCURACY * 1e-2, epsrel=1e-10, full_output=1)
    if err > ACCURACY:
        raise QuadratureFailure(f"quadrature on [{a:g}, {b:g}] did not converge", error_estimate=err)
    return val


def _log_part(t0):
    # integral over [0, 1] of log|t - t0|
    out = 0.0
    for x in (t0, 1.0 - t0):
        if x > 0.0:
            out += x * math.log(x) - x
    return out


def thouless_lyapunov(pot, bs, E, limit=200):
    """Lyapunov exponent at ``E`` computed from the IDS by the Thouless formula."""
    pot = as_potential(pot)
    if not isinstance(bs, BandStructure) or bs.potential != pot:
        raise InvalidInput("band structure does not belong to this potential")
    E = float(E)
    p = pot.period
    v = pot.values
    total = 0.0
    for j in range(1, p + 1):
        a, b = bs.bands[j - 1]
        if b <= a:
            # degenerate band carries its weight at a single point
            total += math.log(abs(E - a)) if E != a else -math.inf
            continue
        s = (-1.0) ** (p - j + 1)
        E_of_t = _band_map(v, a, b, s)
        if a < E < b:
            D, _ = discriminant(pot, E)
            t0 = math.acos(min(1.0, max(-1.0, s * D / 2.0))) / math.pi

            def g(t, t0=t0, E_of_t=E_of_t):
                d = abs(E - E_of_t(t))
                dt = abs(t - t0)
                if d == 0.0 or dt == 0.0:
                    return 0.0
                return math.log(d) - math.log(dt)

            val = _quad(g, 0.0, t0, limit) + _quad(g, t0, 1.0, limit) + _log_part(t0)
        else:
            def f(t, E_of_t=E_of_t):
                d = abs(E - E_of_t(t))
                return math.log(d) if d > 0.0 else 0.0

            val = _quad(f, 0.0, 1.0, limit)
        total += val
    return total / p
