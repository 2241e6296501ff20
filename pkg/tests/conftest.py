import warnings

import numpy as np
import pytest

from logholder import ConstructionConfig, PeriodicPotential, PhiFunction, build_sequence
from logholder.exceptions import ThinBandWarning

# A construction that certifies two stages quickly (p = 8, then p = 32).
DEMO_CONFIG = dict(C0=10.0, eps=8.0, stages=2, period_cap=1024, seed=1)
DEMO_PHI = dict(kind="power", param=3.0, scale=0.1)

# The reference fixture for the acceptance criteria.
FIXTURE_CONFIG = dict(C0=3.0, eps=0.5, stages=2, period_cap=1024, seed=1)
FIXTURE_PHI = dict(kind="power", param=0.25, scale=1.0)


@pytest.fixture
def free():
    return PeriodicPotential([0.0])


@pytest.fixture
def dimer():
    return PeriodicPotential([1.5, -1.5])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_potential(rng, p, amp=3.0):
    return PeriodicPotential(rng.uniform(-amp, amp, p))


@pytest.fixture(scope="session")
def demo_run():
    cfg = ConstructionConfig(**DEMO_CONFIG)
    phi = PhiFunction(**DEMO_PHI)
    V0 = PeriodicPotential([0.0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThinBandWarning)
        records = build_sequence(V0, phi, cfg)
    return V0, phi, cfg, records


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
