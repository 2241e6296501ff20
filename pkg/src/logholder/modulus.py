"""Witness pairs and modulus-of-continuity estimates for constructed potentials.

For every certified stage ``j`` and every energy ``E0`` in the spectrum of
the last approximant ``V_J`` there is an energy ``E_j`` at distance at most
``2 eps_j`` (up to the band width, see :func:`witness_for_energy`) with
``|k(E0) - k(E_j)| >= 1/(2 p_j)``. Combined with the stage certificate this
bounds the log-Hölder ratio from below, which is what :func:`ratio_curve`
reports. :func:`craig_simon_scan` estimates the matching upper constant.
"""
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import check_finite_scalar
from .bands import band_edges, distance_to_spectrum
from .exceptions import InvalidInput, InvariantViolation, ThinBandWarning
from .ids import IDSCurve, energy_grid, ids_periodic_exact, sample_curve
from .transfer import as_potential

SLACK = 1e-12


def _bands_quiet(pot):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThinBandWarning)
        return band_edges(pot)


@dataclass
class WitnessPair:
    j: int
    p: int
    eps_j: float
    E0: float
    E1: float
    band: tuple
    Ej: float
    deltaK: float
    increment: float
    ratio: float

    @property
    def distance(self):
        return abs(self.E0 - self.Ej)

    def to_dict(self):
        d = asdict(self)
        d["band"] = list(self.band)
        return d


def final_curve(records):
    """Exact IDS of the last approximant, used as ``k_eval`` for witnesses."""
    V = records[-1].potential
    bs = _bands_quiet(V)
    return IDSCurve(V, bs, np.empty(0), np.empty(0))


def witness_for_energy(records, j, E0, k_eval=None):
    """Build the stage-``j`` witness pair for the probe energy ``E0``.

    ``k_eval`` is the exact IDS of the last approximant (an :class:`IDSCurve`);
    it defaults to :func:`final_curve`. The candidate ``E_j`` with the larger
    IDS jump is chosen, the lower energy on ties.
    """
    if not records:
        raise InvalidInput("no stage records")
    if not 1 <= j <= len(records):
        raise InvalidInput(f"stage index {j} outside 1..{len(records)}")
    if k_eval is None:
        k_eval = final_curve(records)
    E0 = check_finite_scalar(E0, "E0")
    dist_final, _ = distance_to_spectrum(k_eval.bands, E0)
    if dist_final > 1e-10:
        raise InvalidInput(f"E0 = {E0!r} is not in the spectrum of V_J (distance {dist_final:.3g})")

    rec = records[j - 1]
    p, eps_j = rec.p, rec.eps_j
    bs_j = _bands_quiet(rec.potential)
    dist, E1 = distance_to_spectrum(bs_j, E0)
    if dist > eps_j * (1 + SLACK):
        raise InvariantViolation(f"stage {j}: E0 lies {dist:.3g} from sigma(V_{j}), more than eps_j = {eps_j:.3g}")
    lo, hi = bs_j.bands[bs_j.band_index(E1)]
    left, right = lo - eps_j, hi + eps_j
    k0, kl, kr = (float(x) for x in k_eval(np.array([E0, left, right])))
    increment = kr - kl
    if increment < 1.0 / p - SLACK:
        raise InvariantViolation(f"stage {j}: IDS increment {increment:.6g} over the widened band is below 1/p_j = {1.0 / p:.6g}")
    dl, dr = abs(k0 - kl), abs(k0 - kr)
    Ej, deltaK = (left, dl) if dl >= dr else (right, dr)
    if deltaK < 1.0 / (2 * p) - SLACK:
        raise InvariantViolation(f"stage {j}: witness jump {deltaK:.6g} below 1/(2 p_j)")
    dE = abs(E0 - Ej)
    ratio = deltaK * math.log(1.0 / dE) if 0 < dE < 1 else float("nan")
    return WitnessPair(j, p, eps_j, E0, E1, (float(lo), float(hi)), float(Ej), deltaK, increment, ratio)


def probe_energies(bs, n=10, seed=0):
    """Deterministic probe energies in the spectrum: edges, midpoints, then stratified points.

    Bands are visited evenly across the spectrum; the kind of point cycles
    through lower edge, midpoint, upper edge and a seeded interior point.
    """
    rng = np.random.default_rng(seed)
    p = bs.period
    idx = np.unique(np.linspace(0, p - 1, n).round().astype(int))
    idx = np.resize(idx, n)
    out = []
    for i, b in enumerate(idx):
        lo, hi = bs.bands[b]
        kind = i % 4
        if kind == 0:
            E = lo
        elif kind == 1:
            E = 0.5 * (lo + hi)
        elif kind == 2:
            E = hi
        else:
            E = lo + rng.uniform() * (hi - lo)
        out.append(float(E))
    return out


def ratio_value(eps_j, p_j, phi):
    return math.log(1.0 / (2.0 * eps_j)) / (2.0 * p_j * float(phi(2.0 * eps_j)))


def ratio_lower_bound(eps_j, p_prev, p_j, phi):
    return p_prev / 2.0 - math.log(2.0) / (2.0 * p_j * float(phi(2.0 * eps_j)))


def ratio_curve(records, phi):
    """Lower-bound ratios ``R_j = log(1/(2 eps_j)) / (2 p_j phi(2 eps_j))``.

    Each ``R_j`` bounds ``|k(E) - k(E0)| log(1/|E - E0|) / phi(|E - E0|)``
    from below at the stage-``j`` witness scale; the certificate forces
    ``R_j >= p_{j-1}/2 - log 2 / (2 p_j phi(2 eps_j))``, checked here.
    """
    out = []
    for rec in records:
        R = ratio_value(rec.eps_j, rec.p, phi)
        bound = ratio_lower_bound(rec.eps_j, rec.p_prev, rec.p, phi)
        if R < bound - SLACK * max(1.0, abs(bound)):
            raise InvariantViolation(f"stage {rec.j}: R = {R:.6g} below certified bound {bound:.6g}")
        out.append(R)
    return out


def craig_simon_scan(curve, min_gap=1e-8, max_gap=0.5, chunk=512):
    """Largest ``|dk| log(1/|dE|)`` over sampled pairs with ``|dE|`` in ``[min_gap, max_gap]``.

    Returns ``(C_fit, (E_a, E_b))``, an empirical lower estimate of the best
    log-Hölder constant of the sampled IDS.
    """
    E = np.asarray(curve.energies, dtype=float)
    k = np.asarray(curve.k, dtype=float)
    order = np.argsort(E, kind="stable")
    E, k = E[order], k[order]
    if E.size < 2:
        raise InvalidInput("need at least two samples")
    best, pair, seen = 0.0, None, False
    n = E.size
    for start in range(0, n, chunk):
        rows = slice(start, min(n, start + chunk))
        stop = min(n, int(np.searchsorted(E, E[rows.stop - 1] + max_gap, side="right")))
        dE = E[None, start:stop] - E[rows, None]
        ok = (dE >= min_gap) & (dE <= max_gap)
        if not ok.any():
            continue
        seen = True
        val = np.where(ok, np.abs(k[None, start:stop] - k[rows, None]) * np.log(1.0 / np.where(ok, dE, 1.0)), -1.0)
        a, b = np.unravel_index(np.argmax(val), val.shape)
        if val[a, b] > best or pair is None:
            best = max(best, float(val[a, b]))
            pair = (float(E[start + a]), float(E[start + b]))
    if not seen:
        raise InvalidInput("no sample pair with spacing in the scan range")
    return best, pair


def craig_simon_grid(pot, bs=None, n=1001, levels=15, min_offset=1e-8):
    """Uniform grid plus geometric offsets ``1e-1 .. min_offset`` around every edge."""
    pot = as_potential(pot)
    bs = bs if bs is not None else _bands_quiet(pot)
    offsets = np.logspace(-1, math.log10(min_offset), levels)
    return energy_grid(pot, n, bs=bs, edge_offsets=offsets)


def trace_positivity_check(V, W, grid, tol=1e-10, detail=False):
    """Check ``k_W(E - d) <= k_V(E) <= k_W(E + d)`` with ``d = ||V - W||`` on ``grid``."""
    V, W = as_potential(V), as_potential(W)
    d = V.distance(W)
    grid = np.asarray(grid, dtype=float).ravel()
    bv, bw = _bands_quiet(V), _bands_quiet(W)
    kv = ids_periodic_exact(V, bv, grid)
    below = ids_periodic_exact(W, bw, grid - d)
    above = ids_periodic_exact(W, bw, grid + d)
    ok = bool(np.all(below <= kv + tol) and np.all(kv <= above + tol))
    if detail:
        return ok, {"d": d, "lower_slack": float(np.min(kv - below)), "upper_slack": float(np.min(above - kv))}
    return ok


@dataclass
class ModulusReport:
    ratios: list
    p: list
    eps: list
    lower_bounds: list
    C_fit: float
    C_pair: tuple
    C_fit_refined: float
    grid: dict
    witnesses: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        d["C_pair"] = list(self.C_pair)
        d["witnesses"] = [w.to_dict() for w in self.witnesses]
        return d


def modulus_report(records, phi, probes=10, seed=0, grid_points=1001, levels=15):
    """Witnesses for every stage, the ratio sequence and the Craig–Simon scan of ``V_J``."""
    if not records:
        raise InvalidInput("no stage records")
    curve = final_curve(records)
    witnesses = []
    notes = []
    for rec in records:
        for E0 in probe_energies(curve.bands, probes, seed=seed + rec.j):
            w = witness_for_energy(records, rec.j, E0, curve)
            if w.distance > 2 * rec.eps_j:
                notes.append(f"stage {rec.j}: |E0 - Ej| = {w.distance:.3g} exceeds 2 eps_j at E0 = {E0!r}")
            witnesses.append(w)
    ratios = ratio_curve(records, phi)
    V = records[-1].potential
    base = sample_curve(V, craig_simon_grid(V, curve.bands, grid_points, levels), bs=curve.bands)
    fine = sample_curve(V, craig_simon_grid(V, curve.bands, 2 * grid_points - 1, 2 * levels - 1), bs=curve.bands)
    C, pair = craig_simon_scan(base)
    C2, _ = craig_simon_scan(fine)
    if any(r.thin for r in records):
        notes.append("some stage has bands below the resolvable width")
    if len(records) >= 1:
        notes.append("the last stage's witnesses use V_J itself; proximity transfer applies to j < J")
    return ModulusReport(
        ratios=ratios,
        p=[r.p for r in records],
        eps=[r.eps_j for r in records],
        lower_bounds=[ratio_lower_bound(r.eps_j, r.p_prev, r.p, phi) for r in records],
        C_fit=C, C_pair=pair, C_fit_refined=C2,
        grid={"points": int(base.energies.size), "refined_points": int(fine.energies.size),
              "min_gap": 1e-8, "max_gap": 0.5, "levels": levels},
        witnesses=witnesses, warnings=notes,
    )
