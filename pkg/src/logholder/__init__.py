"""Spectral tools for periodic Schrödinger operators and thin-spectrum approximants.

The package computes band structures, the integrated density of states (IDS)
and Lyapunov exponents of ``(Hu)(n) = u(n+1) + u(n-1) + V(n) u(n)`` with
periodic ``V``, and runs a stagewise construction of periodic potentials
whose IDS is as irregular as log-Hölder continuity allows.
"""
from .bands import BandStructure, band_edges, band_edges_dense, distance_to_spectrum, spectrum_measure
from .construct import (
    ConstructionConfig,
    PhiFunction,
    StageRecord,
    build_sequence,
    limit_proximity_bound,
    refine_once,
    verify_records,
)
from .estimators import LimitPeriodicConstruction, PeriodicSchrodinger
from .exceptions import (
    BandIsolationFailure,
    ConstructionBudgetExceeded,
    InvalidInput,
    InvariantViolation,
    QuadratureFailure,
    ThinBandWarning,
)
from .ids import IDSCurve, ids_finite_count, ids_periodic_exact, sample_curve
from .modulus import (
    ModulusReport,
    WitnessPair,
    craig_simon_scan,
    ratio_curve,
    trace_positivity_check,
    witness_for_energy,
)
from .thouless import thouless_lyapunov
from .transfer import (
    FiniteFamily,
    PeriodicPotential,
    averaged_lyapunov,
    discriminant,
    lyapunov_periodic,
    monodromy,
    step_matrix,
    thinness_diagnostic,
)

__version__ = "0.1.0"
