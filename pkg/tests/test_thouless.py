import math

import numpy as np
import pytest

from logholder import InvalidInput, band_edges, lyapunov_periodic, thouless_lyapunov

from conftest import random_potential


def test_examples(free, dimer):
    bf, bd = band_edges(free), band_edges(dimer)
    assert thouless_lyapunov(free, bf, 3.0) == pytest.approx(math.log((3 + math.sqrt(5)) / 2), abs=1e-5)
    assert thouless_lyapunov(free, bf, 0.0) == pytest.approx(0.0, abs=1e-5)
    assert thouless_lyapunov(dimer, bd, 0.0) == pytest.approx(math.log(2), abs=1e-5)


@pytest.mark.parametrize("p", [1, 2, 5])
def test_matches_transfer_on_grid(rng, p):
    pot = random_potential(rng, p, amp=2.0)
    bs = band_edges(pot)
    s = 2 + pot.supnorm
    grid = np.linspace(-s, s, 201)
    T = np.array([thouless_lyapunov(pot, bs, e) for e in grid])
    assert np.max(np.abs(T - lyapunov_periodic(pot, grid))) <= 1e-4


def test_symmetry(dimer):
    bs = band_edges(dimer)
    for E in (0.3, 1.7, 2.2, 3.1):
        assert thouless_lyapunov(dimer, bs, E) == pytest.approx(thouless_lyapunov(dimer, bs, -E), abs=1e-6)


def test_mismatch(free, dimer):
    with pytest.raises(InvalidInput):
        thouless_lyapunov(free, band_edges(dimer), 0.0)
