"""Band structure of periodic Schrödinger operators.

The spectrum of ``Delta + V`` for ``p``-periodic ``V`` is the set where the
discriminant satisfies ``|D(E)| <= 2``; it consists of ``p`` closed bands.
Edges are isolated from the discriminant itself: the zeros of ``D`` (one per
band) bracket the critical points of ``D`` (one per gap), and between two
consecutive critical points ``D`` is monotone, so each edge is a bracketed
root of ``D = +-2``.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import BandIsolationFailure, InvalidInput, ThinBandWarning
from .transfer import PeriodicPotential, as_potential

THIN_WIDTH = 1e-12
EDGE_TOL = 1e-13
SEARCH_MARGIN = 0.1


@dataclass(frozen=True, eq=False)
class BandStructure:
    """The ``p`` bands of a periodic operator, in increasing order.

    ``bands`` has shape ``(p, 2)``; ``thin`` flags bands narrower than
    ``THIN_WIDTH``, whose widths are below what double precision resolves.
    """

    potential: PeriodicPotential
    bands: np.ndarray
    thin: np.ndarray
    method: str = "discriminant"

    @property
    def period(self):
        return self.bands.shape[0]

    @property
    def edges(self):
        return self.bands.ravel().copy()

    @property
    def widths(self):
        return self.bands[:, 1] - self.bands[:, 0]

    @property
    def measure(self):
        return spectrum_measure(self)

    @property
    def any_thin(self):
        return bool(np.any(self.thin))

    def contains(self, E, tol=0.0):
        dist, _ = distance_to_spectrum(self, E)
        return dist <= tol

    def band_index(self, E):
        """0-based index of the band nearest to ``E`` (lower band on ties)."""
        E = float(E)
        d = np.maximum(self.bands[:, 0] - E, 0.0) + np.maximum(E - self.bands[:, 1], 0.0)
        return int(np.argmin(d))


def search_interval(pot):
    pot = as_potential(pot)
    r = 2.0 + pot.supnorm + SEARCH_MARGIN
    return -r, r


def floquet_matrix(pot, theta):
    """Hermitian ``p x p`` restriction with the twisted boundary ``psi(n+p) = e^{i theta} psi(n)``.

    Its eigenvalues are the solutions of ``D(E) = 2 cos(theta)``.
    """
    v = as_potential(pot).values
    p = v.shape[0]
    H = np.diag(v.astype(complex))
    idx = np.arange(p - 1)
    H[idx, idx + 1] += 1.0
    H[idx + 1, idx] += 1.0
    phase = np.exp(1j * theta)
    H[p - 1, 0] += phase
    H[0, p - 1] += np.conj(phase)
    return H


def _closed_form_edges(v):
    if v.shape[0] == 1:
        return np.array([[v[0] - 2.0, v[0] + 2.0]])
    a, b = float(v[0]), float(v[1])
    lo, hi = min(a, b), max(a, b)
    mid = 0.5 * (a + b)
    r = np.hypot(0.5 * (a - b), 2.0)
    return np.array([[mid - r, lo], [hi, mid + r]])


def band_edges_dense(pot):
    """Edges from the periodic and antiperiodic eigenvalues (``D = 2`` and ``D = -2``)."""
    pot = as_potential(pot)
    ev = np.concatenate([
        np.linalg.eigvalsh(floquet_matrix(pot, 0.0)),
        np.linalg.eigvalsh(floquet_matrix(pot, np.pi)),
    ])
    ev.sort()
    return ev.reshape(-1, 2)


def _discriminant_edges(v, tol):
    p = v.shape[0]
    lo, hi = search_interval(PeriodicPotential(v))
    zeros = np.linalg.eigvalsh(floquet_matrix(v, 0.5 * np.pi))
    crit = _kernels.bisect_derivative_roots(v, zeros[:-1].copy(), zeros[1:].copy(), tol)
    if np.any(np.isnan(crit)):
        raise BandIsolationFailure("could not bracket every critical point of D",
                                   partial={"zeros": zeros, "critical": crit})
    left = np.concatenate([[lo], crit])
    right = np.concatenate([crit, [hi]])
    # re-solve D = 0 inside each monotone branch; thin bands make eigvalsh alone too coarse
    refined = _kernels.solve_level_many(v, left, right, np.zeros(p), tol)
    zeros = np.where(np.isnan(refined), zeros, refined)
    j = np.arange(1, p + 1)
    lower_level = 2.0 * (-1.0) ** (p - j + 1)
    lower = _kernels.solve_level_many(v, left, zeros, lower_level, tol)
    upper = _kernels.solve_level_many(v, zeros, right, -lower_level, tol)
    # No sign change next to a branch end has two causes. At a closed gap D
    # touches +-2 at the critical point, which is then the edge. Otherwise the
    # band is narrower than the rounding noise of D and collapses to its zero.
    tr, _, ls = _kernels.discriminant_many(v, crit)
    closed = np.concatenate([[False], (ls == 0.0) & (np.abs(tr) <= 2.0 + 1e-9), [False]])
    lower = np.where(np.isnan(lower), np.where(closed[:-1], left, zeros), lower)
    upper = np.where(np.isnan(upper), np.where(closed[1:], right, zeros), upper)
    bands = np.column_stack([lower, upper])
    if np.any(np.isnan(bands)):
        raise BandIsolationFailure(f"isolated {int(np.sum(~np.isnan(bands)))} of {2 * p} edges",
                                   partial=bands)
    return bands


def band_edges(pot, method="discriminant", tol=EDGE_TOL):
    """Compute the band structure of ``Delta + V``.

    ``method="discriminant"`` (default) bisects the discriminant on monotone
    branches; ``method="dense"`` uses the periodic/antiperiodic eigenvalues
    and is kept as an independent cross-check. Periods 1 and 2 use the
    closed-form roots of the discriminant in both cases.
    """
    pot = as_potential(pot)
    v = pot.values
    if method not in ("discriminant", "dense"):
        raise InvalidInput(f"unknown method {method!r}")
    if pot.period <= 2:
        bands = _closed_form_edges(v)
    elif method == "dense":
        bands = band_edges_dense(pot)
    else:
        try:
            bands = _discriminant_edges(v, tol)
        except BandIsolationFailure:
            bands = _polish_dense(v, tol)
    bands = _tidy(bands)
    thin = (bands[:, 1] - bands[:, 0]) < THIN_WIDTH
    if np.any(thin):
        warnings.warn(f"{int(thin.sum())} of {pot.period} bands narrower than {THIN_WIDTH:g}",
                      ThinBandWarning, stacklevel=2)
    return BandStructure(pot, bands, thin, method)


def _polish_dense(v, tol):
    # retry from eigensolver seeds, widening each bracket until D - level changes sign
    pot = PeriodicPotential(v)
    p = v.shape[0]
    seeds = band_edges_dense(pot).ravel()
    j = np.repeat(np.arange(1, p + 1), 2)
    level = 2.0 * (-1.0) ** (p - j + 1) * np.tile([1.0, -1.0], p)
    out = np.full(2 * p, np.nan)
    for width in (1e-12, 1e-10, 1e-8, 1e-6):
        todo = np.isnan(out)
        if not todo.any():
            break
        out[todo] = _kernels.solve_level_many(v, seeds[todo] - width, seeds[todo] + width,
                                              level[todo], tol)
    if np.any(np.isnan(out)):
        raise BandIsolationFailure(f"isolated {int(np.sum(~np.isnan(out)))} of {2 * p} edges",
                                   partial=out.reshape(-1, 2))
    return out.reshape(-1, 2)


def _tidy(bands):
    bands = np.array(bands, dtype=float)
    bands[:, 1] = np.maximum(bands[:, 1], bands[:, 0])
    # rounding can push touching edges of a closed gap past each other
    for k in range(1, bands.shape[0]):
        if bands[k, 0] < bands[k - 1, 1]:
            m = 0.5 * (bands[k, 0] + bands[k - 1, 1])
            bands[k - 1, 1] = m
            bands[k, 0] = m
    return bands


def spectrum_measure(bs):
    """Lebesgue measure of the spectrum: the sum of band widths."""
    return float(np.sum(bs.bands[:, 1] - bs.bands[:, 0]))


def distance_to_spectrum(bs, E):
    """Return ``(dist, nearest)`` from ``E`` to the spectrum; ties go to the lower energy."""
    E = float(E)
    lo, hi = bs.bands[:, 0], bs.bands[:, 1]
    nearest = np.clip(E, lo, hi)
    d = np.abs(nearest - E)
    k = int(np.argmin(d))
    best = d[k]
    cands = nearest[d == best]
    return float(best), float(cands.min())
