"""Stagewise construction of periodic approximants with thin spectra.

Each stage ``j`` perturbs ``V_{j-1}`` inside the sup-norm budget
``min(eps, eps_1, ..., eps_{j-1}) / 2^j`` into a potential of period
``p_j = m * p_{j-1}`` whose spectral measure ``eps_j`` satisfies

    log(1 / eps_j) >= p_{j-1} * p_j * phi(2 * eps_j).

No algorithm is known that produces such a perturbation directly, so
candidates are enumerated (``m = 1, 2, 4, ...`` and a fixed list of
pseudorandom seeds per ``m``) and each one is certified by measuring its
band structure. The first certified candidate in ``(m, seed)`` order wins.
"""
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import check_finite_scalar, check_positive_int
from .bands import THIN_WIDTH, band_edges, spectrum_measure
from .exceptions import (
    ConstructionBudgetExceeded,
    InvalidInput,
    InvariantViolation,
    ThinBandWarning,
)
from .ids import energy_grid, ids_finite_count, ids_periodic_exact
from .transfer import PeriodicPotential, as_potential

PHI_KINDS = ("power", "loglog")


@dataclass(frozen=True)
class PhiFunction:
    """Increasing modulus ``phi`` with ``phi(x) -> 0`` as ``x -> 0``.

    ``power``: ``scale * x**param``; ``loglog``:
    ``scale * log(log(e**e + 1/x))**(-param)``.
    """

    kind: str = "power"
    param: float = 0.25
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in PHI_KINDS:
            raise InvalidInput(f"phi kind must be one of {PHI_KINDS}, got {self.kind!r}")
        if not check_finite_scalar(self.param, "phi.param") > 0:
            raise InvalidInput("phi.param must be positive")
        if not check_finite_scalar(self.scale, "phi.scale") > 0:
            raise InvalidInput("phi.scale must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "power":
            out = self.scale * x ** self.param
        else:
            out = self.scale * np.log(np.log(np.e ** np.e + 1.0 / x)) ** (-self.param)
        return float(out) if out.ndim == 0 else out

    def scaled(self, c):
        return PhiFunction(self.kind, self.param, self.scale * c)

    def validate(self, n=1000):
        """Check positivity and monotonicity on a log grid over ``[1e-30, 1e3]``.

        Both families tend to 0 at 0 by construction; numerically only a
        strict overall decrease toward the left end is required, since the
        log-log family decays too slowly for a stronger finite test.
        """
        x = np.logspace(-30, 3, n)
        y = self(x)
        if not np.all(np.isfinite(y)) or np.any(y <= 0):
            raise InvalidInput("phi must be finite and positive on (0, inf)")
        if np.any(np.diff(y) < 0):
            raise InvalidInput("phi must be increasing")
        if not y[0] < y[-1]:
            raise InvalidInput("phi must decrease toward 0")
        return True

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ConstructionConfig:
    C0: float = 3.0
    eps: float = 0.5
    stages: int = 2
    period_cap: int = 1024
    seed: int = 1
    candidate_attempts: int = 4
    N_validate: int = 20000
    grid_points: int = 201

    def __post_init__(self):
        C0 = check_finite_scalar(self.C0, "C0")
        eps = check_finite_scalar(self.eps, "eps")
        if C0 <= 0:
            raise InvalidInput("C0 must be positive")
        if not 0 < eps < C0:
            raise InvalidInput("eps must lie in (0, C0)")
        if isinstance(self.stages, bool) or int(self.stages) != self.stages or self.stages < 0:
            raise InvalidInput("stages must be a non-negative integer")
        check_positive_int(self.period_cap, "period_cap")
        check_positive_int(self.candidate_attempts, "candidate_attempts")
        check_positive_int(self.N_validate, "N_validate")
        check_positive_int(self.grid_points, "grid_points")
        if int(self.seed) != self.seed:
            raise InvalidInput("seed must be an integer")

    def to_dict(self):
        return asdict(self)


@dataclass
class Certificate:
    """Measured spectral certificate of one candidate."""

    period: int
    measure: float
    lhs: float
    rhs: float
    thin: bool

    @property
    def ok(self):
        return self.lhs >= self.rhs

    @property
    def gap(self):
        return self.rhs - self.lhs


@dataclass
class StageRecord:
    j: int
    potential: PeriodicPotential
    p: int
    p_prev: int
    eps_j: float
    lhs: float
    rhs: float
    budget: float
    actual_step: float
    supnorm: float
    m: int
    seed_used: int | None
    attempts: int
    thin: bool = False
    ids_error: float = float("nan")
    notes: list = field(default_factory=list)

    def to_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "potential"}
        d["values"] = self.potential.values.tolist()
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        values = d.pop("values")
        return cls(potential=PeriodicPotential(values), **d)


def certify(pot, psi):
    """Measure ``|Sigma|`` from scratch and evaluate ``log(1/|Sigma|) >= p * psi(|Sigma|)``."""
    pot = as_potential(pot)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThinBandWarning)
        bs = band_edges(pot)
    measure = spectrum_measure(bs)
    lhs = math.inf if measure <= 0 else -math.log(measure)
    rhs = pot.period * float(psi(measure))
    return Certificate(pot.period, measure, lhs, rhs, bs.any_thin)


def candidate_seed(seed, stage, m, attempt):
    return int(np.random.SeedSequence([int(seed), int(stage), int(m), int(attempt)]).generate_state(1)[0])


def candidate(f, m, amplitude, seed_used):
    rng = np.random.default_rng(seed_used)
    g = rng.uniform(-amplitude, amplitude, m * f.period)
    return PeriodicPotential(np.tile(f.values, m) + g)


def refine_once(f, eps_budget, psi, cfg, stage=1):
    """Find ``f~`` with ``||f~ - f|| <= eps_budget`` satisfying the thinness certificate.

    Returns ``(f~, info)`` where ``info`` holds the certificate together
    with ``m``, ``seed_used`` and ``attempts``. ``f`` itself is returned
    (``m = 1``) when it already passes.
    """
    f = as_potential(f)
    eps_budget = check_finite_scalar(eps_budget, "eps_budget")
    if eps_budget <= 0:
        raise InvalidInput("eps_budget must be positive")
    if f.supnorm + eps_budget > cfg.C0 * (1 + 1e-12):
        raise InvalidInput(f"||f|| + budget = {f.supnorm + eps_budget:g} exceeds C0 = {cfg.C0:g}")
    cert = certify(f, psi)
    attempts = 1
    if cert.ok:
        return f, {"certificate": cert, "m": 1, "seed_used": None, "attempts": attempts}
    best, best_cert = f, cert
    m = 2
    while m * f.period <= cfg.period_cap:
        for attempt in range(cfg.candidate_attempts):
            seed_used = candidate_seed(cfg.seed, stage, m, attempt)
            cand = candidate(f, m, eps_budget / 2.0, seed_used)
            cert = certify(cand, psi)
            attempts += 1
            if cert.ok:
                if cert.thin:
                    warnings.warn(f"stage {stage}: accepted candidate has bands below {THIN_WIDTH:g}",
                                  ThinBandWarning, stacklevel=2)
                return cand, {"certificate": cert, "m": m, "seed_used": seed_used, "attempts": attempts}
            if cert.gap < best_cert.gap:
                best, best_cert = cand, cert
        m *= 2
    raise ConstructionBudgetExceeded(
        f"stage {stage}: no certified candidate up to period {cfg.period_cap} "
        f"after {attempts} attempts (best gap rhs - lhs = {best_cert.gap:.6g} "
        f"at period {best_cert.period}, measure {best_cert.measure:.6g})",
        best=(best, best_cert), gap=best_cert.gap, stage=stage)


def stage_budget(eps, measures, j):
    """Sup-norm step allowed at stage ``j``: ``min(eps, eps_1, ..., eps_{j-1}) / 2^j``."""
    return min([eps, *measures]) / 2.0 ** j


def _ids_error(pot, N, n_grid):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThinBandWarning)
        bs = band_edges(pot)
    grid = energy_grid(pot, n_grid)
    return float(np.max(np.abs(ids_finite_count(pot.window(N), grid) - ids_periodic_exact(pot, bs, grid))))


def build_sequence(V0, phi, cfg):
    """Run ``cfg.stages`` refinement stages starting from ``V0``.

    Stage ``j`` uses ``psi_j(x) = p_{j-1} * phi(2x)``. Deterministic in
    ``(V0, phi, cfg)``. On failure the raised ``ConstructionBudgetExceeded``
    carries the completed records.
    """
    V0 = as_potential(V0)
    if V0.supnorm > cfg.C0 - cfg.eps + 1e-12:
        raise InvalidInput(f"seed potential sup-norm {V0.supnorm:g} exceeds C0 - eps = {cfg.C0 - cfg.eps:g}")
    records = []
    prev = V0
    measures = []
    for j in range(1, cfg.stages + 1):
        budget = stage_budget(cfg.eps, measures, j)
        p_prev = prev.period

        def psi(x, p_prev=p_prev):
            return p_prev * phi(2.0 * x)

        try:
            Vj, info = refine_once(prev, budget, psi, cfg, stage=j)
        except ConstructionBudgetExceeded as exc:
            exc.stage = j
            exc.records = records
            raise
        cert = info["certificate"]
        rec = StageRecord(
            j=j, potential=Vj, p=Vj.period, p_prev=p_prev, eps_j=cert.measure,
            lhs=cert.lhs, rhs=cert.rhs, budget=budget, actual_step=Vj.distance(prev),
            supnorm=Vj.supnorm, m=info["m"], seed_used=info["seed_used"],
            attempts=info["attempts"], thin=cert.thin,
            ids_error=_ids_error(Vj, cfg.N_validate, cfg.grid_points),
        )
        records.append(rec)
        measures.append(cert.measure)
        prev = Vj
    return records


def verify_records(records, V0, phi, cfg):
    """Recompute every stage invariant from the stored potentials alone.

    Raises :class:`InvariantViolation` listing every failed check; returns
    the recomputed certificates otherwise.
    """
    V0 = as_potential(V0)
    problems = []
    prev = V0
    measures = []
    certs = []
    if V0.supnorm > cfg.C0 - cfg.eps + 1e-12:
        problems.append("seed potential exceeds C0 - eps")
    for rec in records:
        j = rec.j
        Vj = rec.potential
        if Vj.period % prev.period:
            problems.append(f"stage {j}: p_{j - 1} = {prev.period} does not divide p_{j} = {Vj.period}")
        budget = stage_budget(cfg.eps, measures, j)
        step = Vj.distance(prev)
        if step > budget:
            problems.append(f"stage {j}: step {step:.6g} exceeds budget {budget:.6g}")
        if Vj.supnorm > cfg.C0:
            problems.append(f"stage {j}: sup-norm {Vj.supnorm:.6g} exceeds C0")
        cert = certify(Vj, lambda x, p=prev.period: p * phi(2.0 * x))
        if not cert.ok:
            problems.append(f"stage {j}: certificate fails, lhs {cert.lhs:.6g} < rhs {cert.rhs:.6g}")
        bound = 4.0 * (Vj.period + 1) / cfg.N_validate
        if not rec.ids_error <= bound:
            problems.append(f"stage {j}: finite-volume IDS error {rec.ids_error:.3g} above {bound:.3g}")
        for name, stored, fresh in (("eps_j", rec.eps_j, cert.measure), ("lhs", rec.lhs, cert.lhs),
                                    ("rhs", rec.rhs, cert.rhs), ("budget", rec.budget, budget)):
            if not (stored == fresh or math.isclose(stored, fresh, rel_tol=1e-12, abs_tol=1e-300)):
                problems.append(f"stage {j}: stored {name} {stored!r} != recomputed {fresh!r}")
        certs.append(cert)
        measures.append(cert.measure)
        prev = Vj
    if problems:
        raise InvariantViolation("; ".join(problems))
    return certs


def limit_proximity_bound(records, j):
    """Total remaining budget ``sum_{i > j} budget_i``; checked against ``eps_j 2^-j``.

    ``eps_0`` is the initial budget ``eps``. Any later approximant, and the
    limit potential, lies within this distance of ``V_j``.
    """
    J = len(records)
    if not 0 <= j <= J:
        raise InvalidInput(f"stage index {j} outside 0..{J}")
    if J == 0:
        return 0.0
    tail = float(sum(r.budget for r in records[j:]))
    eps_j = 2.0 * records[0].budget if j == 0 else records[j - 1].eps_j
    if tail > eps_j * 2.0 ** (-j) * (1 + 1e-12):
        raise InvariantViolation(f"remaining budget {tail:g} exceeds eps_{j} 2^-{j} = {eps_j * 2.0 ** -j:g}")
    return tail
