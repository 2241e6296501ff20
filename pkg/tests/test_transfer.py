import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logholder import (
    FiniteFamily,
    InvalidInput,
    PeriodicPotential,
    averaged_lyapunov,
    discriminant,
    lyapunov_periodic,
    monodromy,
    step_matrix,
    thinness_diagnostic,
)

from conftest import random_potential

potentials = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=50).map(PeriodicPotential)
energies = st.floats(-8, 8, allow_nan=False)


def test_step_matrix_examples():
    np.testing.assert_array_equal(step_matrix(0.0, 0.0, "cocycle"), [[0, -1], [1, 0]])
    np.testing.assert_array_equal(step_matrix(1.0, 3.0, "cocycle"), [[-2, -1], [1, 0]])
    for conv in ("cocycle", "standard"):
        assert np.linalg.det(step_matrix(0.7, -1.3, conv)) == pytest.approx(1.0, abs=1e-15)


def test_step_matrix_rejects_nonfinite():
    with pytest.raises(InvalidInput):
        step_matrix(float("nan"), 0.0)
    with pytest.raises(InvalidInput):
        step_matrix(0.0, float("inf"))


def test_monodromy_closed_forms(free, dimer):
    for E in (-3.0, -0.4, 0.0, 1.7):
        assert np.trace(monodromy(free, E)) == pytest.approx(E, abs=1e-14)
        assert np.trace(monodromy(dimer, E)) == pytest.approx(E * E - 1.5 ** 2 - 2, abs=1e-13)


def test_trace_sign_identity_brute_force(rng):
    for p in range(1, 7):
        pot = random_potential(rng, p)
        E = rng.uniform(-4, 4)
        Mp = np.eye(2)
        for v in pot.values:
            Mp = step_matrix(v, E, "cocycle") @ Mp
        np.testing.assert_allclose(monodromy(pot, E, "cocycle"), Mp, atol=1e-12)
        assert np.trace(Mp) == pytest.approx((-1) ** p * np.trace(monodromy(pot, E, "standard")), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(potentials, energies)
def test_monodromy_determinant(pot, E):
    M = monodromy(pot, E)
    scale = max(1.0, np.abs(M).max() ** 2)
    assert abs(np.linalg.det(M) - 1.0) <= 1e-9 * scale


@settings(max_examples=100, deadline=None)
@given(potentials, energies)
def test_conventions_agree(pot, E):
    a = lyapunov_periodic(pot, E, "cocycle")
    b = lyapunov_periodic(pot, E, "standard")
    assert a == pytest.approx(b, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(potentials, energies)
def test_lyapunov_vanishes_exactly_on_bands(pot, E):
    D, _ = discriminant(pot, E)
    L = lyapunov_periodic(pot, E)
    assert L >= 0
    if abs(D) < 2 - 1e-12:
        assert L == 0
    elif abs(D) > 2 + 1e-12:
        assert L > 0


def test_discriminant_examples(free, dimer):
    assert discriminant(free, 0.3) == pytest.approx((0.3, 1.0))
    D, Dp = discriminant(dimer, 0.0)
    assert D == pytest.approx(-4.25, abs=1e-14)
    assert Dp == pytest.approx(0.0, abs=1e-14)


def test_discriminant_derivative_matches_finite_difference(rng):
    for p in (5, 9, 17):
        pot = random_potential(rng, p)
        for E in (0.37, *rng.uniform(-4, 4, 5)):
            h = 1e-5
            fd = (discriminant(pot, E + h)[0] - discriminant(pot, E - h)[0]) / (2 * h)
            _, Dp = discriminant(pot, E)
            assert Dp == pytest.approx(fd, rel=1e-5, abs=1e-6)


def test_discriminant_vectorised(dimer):
    E = np.linspace(-3, 3, 7)
    D, Dp = discriminant(dimer, E)
    np.testing.assert_allclose(D, E ** 2 - 4.25, atol=1e-13)
    np.testing.assert_allclose(Dp, 2 * E, atol=1e-13)


def test_lyapunov_examples(free, dimer):
    assert lyapunov_periodic(free, 0.0) == 0.0
    assert lyapunov_periodic(free, 3.0) == pytest.approx(math.log((3 + math.sqrt(5)) / 2), abs=1e-12)
    assert lyapunov_periodic(dimer, 0.0) == pytest.approx(math.log(2), abs=1e-12)


def test_large_period_does_not_overflow(rng):
    pot = random_potential(rng, 2000, amp=5.0)
    L = lyapunov_periodic(pot, 40.0)
    assert np.isfinite(L) and L > 0


def test_averaged_lyapunov(free, dimer):
    assert averaged_lyapunov(FiniteFamily([dimer]), 0.0) == pytest.approx(lyapunov_periodic(dimer, 0.0))
    assert averaged_lyapunov(FiniteFamily([dimer, dimer]), 0.0) == pytest.approx(math.log(2))
    fam = FiniteFamily([PeriodicPotential([0.0, 0.0]), dimer])
    assert averaged_lyapunov(fam, 0.0) == pytest.approx(math.log(2) / 2, abs=1e-12)


def test_thinness_diagnostic(free):
    dh, pm = thinness_diagnostic(FiniteFamily([free]), np.linspace(-3, 3, 61), 8)
    assert dh == 0 and pm == 1
    # A single strongly coupled p = 1 potential has L = 0 on its own band, so the
    # grid minimum is 0; two members with disjoint bands never vanish together.
    fam = FiniteFamily([PeriodicPotential([10.0]), PeriodicPotential([-10.0])])
    dh, pm = thinness_diagnostic(fam, np.linspace(-13, 13, 261), 8)
    assert dh > 0 and pm < 1
    with pytest.raises(InvalidInput):
        thinness_diagnostic(FiniteFamily([free]), [], 8)


def test_potential_basics(rng):
    pot = random_potential(rng, 3)
    assert pot.tile(4).period == 12
    assert pot.shifted(1.0).values == pytest.approx(pot.values + 1.0)
    w = pot.window(10, start=2)
    assert w.shape == (10,) and w[0] == pot.values[2] and w[1] == pot.values[0]
    assert pot.distance(pot.tile(2)) == 0.0
    assert pot == pot.tile(1) and hash(pot) == hash(PeriodicPotential(pot.values.copy()))
    with pytest.raises(InvalidInput):
        PeriodicPotential([])
    with pytest.raises(InvalidInput):
        PeriodicPotential([0.0, float("nan")])
    with pytest.raises((ValueError, TypeError)):
        pot.values[0] = 1.0
