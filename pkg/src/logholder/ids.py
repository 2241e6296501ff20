"""Integrated density of states of periodic operators.

Two independent routes: :func:`ids_periodic_exact` evaluates the closed
form built from the discriminant band by band, and :func:`ids_finite_count`
counts eigenvalues of a finite Dirichlet restriction with a Sturm sequence.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._validation import check_energies, check_positive_int, check_values
from .bands import BandStructure, band_edges, search_interval
from .exceptions import InvalidInput
from .transfer import PeriodicPotential, as_potential, discriminant


def ids_periodic_exact(pot, bs, E):
    """Exact IDS ``k_V(E)`` of a periodic potential.

    Band ``j`` (1-based, counted from the bottom) carries weight ``1/p``.
    Inside it ``k = (j - 1)/p + t_j(E)/p`` with
    ``t_j = arccos((-1)^(p-j+1) D(E)/2) / pi``; on the gap above it ``k = j/p``.
    Bands flagged thin are interpolated linearly, since ``D`` is rounding
    noise across them. The stored edges map to ``t = 0`` and ``t = 1`` exactly.
    """
    pot = as_potential(pot)
    if not isinstance(bs, BandStructure) or bs.potential != pot:
        raise InvalidInput("band structure does not belong to this potential")
    E = check_energies(E)
    flat = np.atleast_1d(E).ravel()
    p = pot.period
    lo, hi = bs.bands[:, 0], bs.bands[:, 1]
    # number of bands whose lower edge is <= E
    j = np.searchsorted(lo, flat, side="right")
    k = j / p
    idx = j - 1
    inside = (j >= 1)
    inside[inside] = flat[inside] <= hi[idx[inside]]
    k[j == 0] = 0.0
    if np.any(inside):
        jj = j[inside]
        Ei = flat[inside]
        D, _ = discriminant(pot, Ei)
        sign = (-1.0) ** (p - jj + 1)
        t = np.arccos(np.clip(sign * D / 2.0, -1.0, 1.0)) / np.pi
        # arccos has infinite slope at +-1, so rounding in the stored edges would
        # show up as O(sqrt(1e-13 |D'|)); the edges themselves are t = 0 and t = 1
        t[Ei == lo[jj - 1]] = 0.0
        t[Ei == hi[jj - 1]] = 1.0
        thin = bs.thin[jj - 1]
        if np.any(thin):
            a, b = lo[jj - 1][thin], hi[jj - 1][thin]
            width = np.where(b > a, b - a, 1.0)
            t[thin] = np.where(b > a, (Ei[thin] - a) / width, 1.0)
        k[inside] = (jj - 1 + t) / p
    k = np.clip(k, 0.0, 1.0)
    if E.ndim == 0:
        return float(k[0])
    return k.reshape(E.shape)


def ids_finite_count(values_window, E):
    """Fraction of eigenvalues of the ``N x N`` Dirichlet restriction strictly below ``E``.

    The count is the number of negative pivots of ``H - E`` (Sturm sequence),
    ``O(N)`` per energy.
    """
    try:
        window = check_values(values_window, "values_window")
    except InvalidInput:
        if np.size(values_window) == 0:
            raise InvalidInput("window length N must be at least 1") from None
        raise
    E = check_energies(E)
    counts = _kernels.sturm_count_many(window, np.atleast_1d(E).ravel().astype(float))
    out = counts / window.shape[0]
    if E.ndim == 0:
        return float(out[0])
    return out.reshape(E.shape)


def eigenvalue_count(values_window, E):
    """Integer Sturm count behind :func:`ids_finite_count`."""
    window = check_values(values_window, "values_window")
    E = check_energies(E)
    return _kernels.sturm_count_many(window, np.atleast_1d(E).ravel().astype(float)).reshape(E.shape)


def energy_grid(pot, n=1001, bs=None, edge_offsets=None, interval=None):
    """Uniform grid over the search interval, optionally refined at band edges.

    ``edge_offsets`` adds ``edge +- offset`` for every band edge and every
    offset, clipped to the interval.
    """
    pot = as_potential(pot)
    n = check_positive_int(n, "n")
    a, b = interval if interval is not None else search_interval(pot)
    grid = np.linspace(a, b, n)
    if edge_offsets is not None:
        if bs is None:
            bs = band_edges(pot)
        offs = np.asarray(edge_offsets, dtype=float)
        e = bs.edges[:, None]
        extra = np.concatenate([e.ravel(), (e - offs).ravel(), (e + offs).ravel()])
        grid = np.concatenate([grid, extra[(extra >= a) & (extra <= b)]])
    return np.unique(grid)


@dataclass(frozen=True, eq=False)
class IDSCurve:
    """Exact IDS of one potential sampled on an energy grid."""

    potential: PeriodicPotential
    bands: BandStructure
    energies: np.ndarray
    k: np.ndarray

    def __call__(self, E):
        return ids_periodic_exact(self.potential, self.bands, E)

    def rows(self):
        return list(zip(self.energies.tolist(), self.k.tolist()))


def sample_curve(pot, grid=1001, bs=None):
    """Sample the exact IDS on ``grid`` (an array, or a point count for the search interval)."""
    pot = as_potential(pot)
    if bs is None:
        bs = band_edges(pot)
    if np.ndim(grid) == 0:
        grid = energy_grid(pot, int(grid), bs=bs)
    grid = np.sort(check_energies(grid, "grid").ravel())
    if grid.size == 0:
        raise InvalidInput("grid must not be empty")
    return IDSCurve(pot, bs, grid, ids_periodic_exact(pot, bs, grid))
