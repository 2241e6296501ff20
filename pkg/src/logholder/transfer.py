"""Transfer matrices, discriminants and Lyapunov exponents of periodic potentials.

Two step-matrix conventions are supported. ``"cocycle"`` uses
``[[v - E, -1], [1, 0]]`` and ``"standard"`` uses ``[[E - v, -1], [1, 0]]``.
The two are conjugate up to the sign ``(-1)^p`` on the trace, so spectral
radii (and hence Lyapunov exponents) agree, but traces must not be mixed.
Everything band related in this package uses the standard convention, for
which the periodic-boundary eigenvalues are exactly the solutions of
``D(E) = 2``.

Sites are numbered ``1..p`` and the monodromy is ``A(v_p) ... A(v_1)``;
``values[0]`` is site 1.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._validation import check_energies, check_finite_scalar, check_positive_int, check_values
from .exceptions import InvalidInput

CONVENTIONS = ("cocycle", "standard")


@dataclass(frozen=True, eq=False)
class PeriodicPotential:
    """A real ``p``-periodic sequence on the integers, stored over one period."""

    values: np.ndarray

    def __post_init__(self):
        arr = check_values(self.values).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def period(self):
        return self.values.shape[0]

    @property
    def supnorm(self):
        return float(np.max(np.abs(self.values)))

    def tile(self, m):
        """The same sequence viewed as an ``m * p`` periodic potential."""
        m = check_positive_int(m, "m")
        return PeriodicPotential(np.tile(self.values, m))

    def shifted(self, c):
        return PeriodicPotential(self.values + check_finite_scalar(c, "c"))

    def window(self, N, start=0):
        """The first ``N`` sites starting at ``start`` (0-based index into values)."""
        N = int(N)
        idx = (start + np.arange(N)) % self.period
        return self.values[idx]

    def distance(self, other):
        """Sup-norm distance between two periodic sequences of any periods."""
        p = np.lcm(self.period, other.period)
        return float(np.max(np.abs(self.window(p) - other.window(p))))

    def __eq__(self, other):
        if not isinstance(other, PeriodicPotential):
            return NotImplemented
        return self.period == other.period and bool(np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash(self.values.tobytes())

    def __repr__(self):
        return f"PeriodicPotential(period={self.period}, supnorm={self.supnorm:.6g})"


def as_potential(pot):
    if isinstance(pot, PeriodicPotential):
        return pot
    return PeriodicPotential(pot)


@dataclass(frozen=True, eq=False)
class FiniteFamily:
    """A finite multiset of periodic potentials sharing one period."""

    members: tuple = field(default_factory=tuple)

    def __post_init__(self):
        members = tuple(as_potential(m) for m in self.members)
        if not members:
            raise InvalidInput("a family needs at least one member")
        periods = {m.period for m in members}
        if len(periods) != 1:
            raise InvalidInput(f"family members must share one period, got {sorted(periods)}")
        object.__setattr__(self, "members", members)

    @property
    def count(self):
        return len(self.members)

    @property
    def period(self):
        return self.members[0].period

    @property
    def supnorm(self):
        return max(m.supnorm for m in self.members)


def _check_convention(convention):
    if convention not in CONVENTIONS:
        raise InvalidInput(f"convention must be one of {CONVENTIONS}, got {convention!r}")


def step_matrix(v, E, convention="cocycle"):
    v = check_finite_scalar(v, "v")
    E = check_finite_scalar(E, "E")
    _check_convention(convention)
    x = v - E if convention == "cocycle" else E - v
    return np.array([[x, -1.0], [1.0, 0.0]])


def monodromy(pot, E, convention="standard"):
    """Ordered product of the step matrices over one period.

    Entries grow like ``exp(p * L(E))``; for long periods far from the
    spectrum use :func:`discriminant` or :func:`lyapunov_periodic`, which
    rescale internally.
    """
    pot = as_potential(pot)
    E = check_finite_scalar(E, "E")
    _check_convention(convention)
    M = np.eye(2)
    for v in pot.values:
        M = step_matrix(v, E, convention) @ M
    return M


def discriminant(pot, E):
    """Return ``(D(E), D'(E))`` for the standard convention.

    ``E`` may be a scalar or an array. The derivative is carried through the
    product by the product rule, not by differencing.
    """
    pot = as_potential(pot)
    E = check_energies(E)
    flat = np.atleast_1d(E).ravel()
    tr, dtr, ls = _kernels.discriminant_many(pot.values, flat)
    with np.errstate(over="ignore", invalid="ignore"):
        scale = np.exp(ls)
        D = (tr * scale).reshape(E.shape)
        Dp = (dtr * scale).reshape(E.shape)
    if E.ndim == 0:
        return float(D), float(Dp)
    return D, Dp


def spectral_radius(M):
    """Spectral radius of a real 2x2 matrix with determinant one."""
    t = abs(float(np.trace(M)))
    if t <= 2.0:
        return 1.0
    return (t + np.sqrt((t - 2.0) * (t + 2.0))) / 2.0


def lyapunov_periodic(pot, E, convention="standard"):
    """Lyapunov exponent ``(1/p) log rho(M(E))``; zero exactly where ``|D| <= 2``.

    Vectorized over ``E`` for the standard convention. The cocycle convention
    builds the monodromy explicitly and is meant for cross-checks at
    moderate periods.
    """
    pot = as_potential(pot)
    _check_convention(convention)
    E = check_energies(E)
    if convention == "cocycle":
        out = np.array([np.log(spectral_radius(monodromy(pot, e, "cocycle")))
                        for e in np.atleast_1d(E).ravel()]) / pot.period
    else:
        out = _kernels.log_spectral_radius_many(pot.values, np.atleast_1d(E).ravel()) / pot.period
    if E.ndim == 0:
        return float(out[0])
    return out.reshape(E.shape)


def averaged_lyapunov(fam, E):
    """Mean Lyapunov exponent over the members of a finite family."""
    if not isinstance(fam, FiniteFamily):
        fam = FiniteFamily(tuple(fam))
    total = sum(np.asarray(lyapunov_periodic(f, E)) for f in fam.members)
    out = total / fam.count
    return float(out) if np.ndim(out) == 0 else out


def thinness_diagnostic(fam, grid, candidate_period):
    """Grid estimate of the family's Lyapunov floor and the thinness it predicts.

    Returns ``(delta_hat, predicted_measure)`` where ``delta_hat`` is the grid
    minimum of ``L(E, F) / (#F * p)`` and ``predicted_measure`` is
    ``exp(-delta_hat * candidate_period / 2)``. The exact infimum over the
    real line is replaced by the minimum over ``grid``, which must cover
    ``[-2 - s, 2 + s]`` with ``s`` the largest member sup-norm. Diagnostic
    only: nothing downstream relies on the predicted value.
    """
    if not isinstance(fam, FiniteFamily):
        fam = FiniteFamily(tuple(fam))
    grid = check_energies(grid, "grid").ravel()
    if grid.size == 0:
        raise InvalidInput("grid must not be empty")
    candidate_period = check_positive_int(candidate_period, "candidate_period")
    reach = 2.0 + fam.supnorm
    if grid.min() > -reach or grid.max() < reach:
        raise InvalidInput(f"grid must span [-{reach:g}, {reach:g}]")
    L = averaged_lyapunov(fam, grid)
    delta_hat = float(np.min(L)) / (fam.count * fam.period)
    return delta_hat, float(np.exp(-delta_hat * candidate_period / 2.0))
