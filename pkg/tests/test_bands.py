import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logholder import (
    BandStructure,
    PeriodicPotential,
    band_edges,
    band_edges_dense,
    discriminant,
    distance_to_spectrum,
    lyapunov_periodic,
    spectrum_measure,
)
from logholder.exceptions import ThinBandWarning

from conftest import random_potential


def test_free_and_dimer(free, dimer):
    bs = band_edges(free)
    np.testing.assert_allclose(bs.bands, [[-2, 2]], atol=1e-12)
    assert spectrum_measure(bs) == pytest.approx(4, abs=1e-12)
    bs = band_edges(dimer)
    np.testing.assert_allclose(bs.bands, [[-2.5, -1.5], [1.5, 2.5]], atol=1e-10)
    assert spectrum_measure(bs) == pytest.approx(2, abs=1e-10)


def test_constant_shift_p1():
    bs = band_edges(PeriodicPotential([0.7]))
    np.testing.assert_allclose(bs.bands, [[-1.3, 2.7]], atol=1e-12)


def test_degenerate_band_contributes_zero(free):
    bs = BandStructure(free, np.array([[-1.0, -1.0], [0.0, 2.0]]), np.array([True, False]), "manual")
    assert spectrum_measure(bs) == 2.0


@pytest.mark.parametrize("p", [3, 4, 7, 12, 25, 40])
def test_discriminant_method_agrees_with_dense(rng, p):
    for _ in range(5):
        pot = random_potential(rng, p)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ThinBandWarning)
            a = band_edges(pot)
        b = band_edges_dense(pot)
        assert a.bands.shape == (p, 2)
        np.testing.assert_allclose(a.bands, np.asarray(b).reshape(-1, 2), atol=1e-8)


@pytest.mark.parametrize("p", [2, 5, 16])
def test_edges_solve_discriminant(rng, p):
    pot = random_potential(rng, p, amp=2.0)
    bs = band_edges(pot)
    D, Dp = discriminant(pot, bs.edges)
    assert np.all(np.abs(np.abs(D) - 2) <= 1e-8 * np.maximum(1.0, np.abs(Dp)))
    # L vanishes at every edge up to the square-root growth off the edge
    bound = np.sqrt(np.abs(Dp) * 1e-12) / p + 1e-12
    assert np.all(lyapunov_periodic(pot, bs.edges) <= bound)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=12), st.floats(-2, 2, allow_nan=False))
def test_shift_covariance(values, c):
    pot = PeriodicPotential(values)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThinBandWarning)
        a = band_edges(pot).bands
        b = band_edges(pot.shifted(c)).bands
    np.testing.assert_allclose(b, a + c, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=12))
def test_bands_ordered_disjoint(values):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThinBandWarning)
        bs = band_edges(PeriodicPotential(values))
    b = bs.bands
    assert np.all(b[:, 1] >= b[:, 0])
    assert np.all(b[1:, 0] >= b[:-1, 1] - 1e-12)


def test_tiling_preserves_spectrum(rng):
    pot = random_potential(rng, 3)
    a = band_edges(pot)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThinBandWarning)
        b = band_edges(pot.tile(4))
    assert b.period == 12
    assert spectrum_measure(b) == pytest.approx(spectrum_measure(a), abs=1e-8)


def test_distance_to_spectrum(free, dimer):
    assert distance_to_spectrum(band_edges(free), 0.5) == (0.0, 0.5)
    d, e = distance_to_spectrum(band_edges(free), 3.0)
    assert d == pytest.approx(1.0) and e == pytest.approx(2.0)
    d, e = distance_to_spectrum(band_edges(dimer), 0.0)
    assert d == pytest.approx(1.5) and e == pytest.approx(-1.5)


def test_band_index_and_contains(dimer):
    bs = band_edges(dimer)
    assert bs.contains(2.0) and not bs.contains(0.0)
    assert bs.band_index(2.0) == 1 and bs.band_index(-2.0) == 0


def test_large_period_runs(rng):
    pot = random_potential(rng, 256, amp=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThinBandWarning)
        bs = band_edges(pot)
    assert bs.bands.shape == (256, 2)
    assert 0 < bs.measure < 4 + 2
