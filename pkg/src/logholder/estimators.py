"""scikit-learn style front ends.

``PeriodicSchrodinger`` is fitted on one period of a potential and maps
energies to the IDS (``predict``) or to ``(k, L)`` pairs (``transform``).
``LimitPeriodicConstruction`` is fitted on a seed potential and runs the
stagewise construction; its fitted state is the list of stage records.
"""
import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_energies, check_values
from .bands import band_edges
from .construct import ConstructionConfig, PhiFunction, build_sequence, verify_records
from .exceptions import ThinBandWarning
from .ids import ids_finite_count, ids_periodic_exact
from .modulus import modulus_report, ratio_curve
from .thouless import thouless_lyapunov
from .transfer import PeriodicPotential, lyapunov_periodic


def _values_from_X(X):
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    return check_values(arr, "X")


class PeriodicSchrodinger(TransformerMixin, BaseEstimator):
    """Spectral data of ``Delta + V`` for a periodic ``V``.

    Parameters
    ----------
    method : {"discriminant", "dense"}
        Band-edge solver passed to :func:`logholder.bands.band_edges`.
    """

    def __init__(self, method="discriminant"):
        self.method = method

    def fit(self, X, y=None):
        """Fit on one period of the potential (1-d array, or a single row/column)."""
        self.potential_ = PeriodicPotential(_values_from_X(X))
        self.bands_ = band_edges(self.potential_, method=self.method)
        self.period_ = self.potential_.period
        self.measure_ = self.bands_.measure
        return self

    def predict(self, E):
        check_is_fitted(self, "bands_")
        return ids_periodic_exact(self.potential_, self.bands_, check_energies(E))

    def lyapunov(self, E):
        check_is_fitted(self, "bands_")
        return lyapunov_periodic(self.potential_, check_energies(E))

    def thouless(self, E):
        check_is_fitted(self, "bands_")
        E = np.atleast_1d(check_energies(E))
        return np.array([thouless_lyapunov(self.potential_, self.bands_, e) for e in E])

    def finite_volume(self, E, N):
        check_is_fitted(self, "bands_")
        return ids_finite_count(self.potential_.window(N), check_energies(E))

    def transform(self, X):
        """Columns ``(k(E), L(E))`` for a 1-d array of energies."""
        E = np.atleast_1d(check_energies(X)).ravel()
        return np.column_stack([self.predict(E), self.lyapunov(E)])


class LimitPeriodicConstruction(BaseEstimator):
    """Stagewise thin-spectrum refinement of a seed potential.

    Parameters mirror :class:`~logholder.construct.ConstructionConfig` plus
    the modulus ``phi`` (``phi_kind``, ``phi_param``, ``phi_scale``).
    """

    def __init__(self, C0=3.0, eps=0.5, stages=2, period_cap=1024, seed=1,
                 candidate_attempts=4, N_validate=20000, grid_points=201,
                 phi_kind="power", phi_param=0.25, phi_scale=1.0):
        self.C0 = C0
        self.eps = eps
        self.stages = stages
        self.period_cap = period_cap
        self.seed = seed
        self.candidate_attempts = candidate_attempts
        self.N_validate = N_validate
        self.grid_points = grid_points
        self.phi_kind = phi_kind
        self.phi_param = phi_param
        self.phi_scale = phi_scale

    def _config(self):
        return ConstructionConfig(
            C0=self.C0, eps=self.eps, stages=self.stages, period_cap=self.period_cap,
            seed=self.seed, candidate_attempts=self.candidate_attempts,
            N_validate=self.N_validate, grid_points=self.grid_points,
        )

    def fit(self, X, y=None):
        self.config_ = self._config()
        self.phi_ = PhiFunction(self.phi_kind, self.phi_param, self.phi_scale)
        self.phi_.validate()
        self.seed_potential_ = PeriodicPotential(_values_from_X(X))
        self.records_ = build_sequence(self.seed_potential_, self.phi_, self.config_)
        self.potential_ = self.records_[-1].potential if self.records_ else self.seed_potential_
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ThinBandWarning)
            self.bands_ = band_edges(self.potential_)
        return self

    def verify(self):
        check_is_fitted(self, "records_")
        return verify_records(self.records_, self.seed_potential_, self.phi_, self.config_)

    def ratios(self):
        check_is_fitted(self, "records_")
        return ratio_curve(self.records_, self.phi_)

    def report(self, **kwargs):
        check_is_fitted(self, "records_")
        return modulus_report(self.records_, self.phi_, **kwargs)

    def predict(self, E):
        """Exact IDS of the last approximant."""
        check_is_fitted(self, "records_")
        return ids_periodic_exact(self.potential_, self.bands_, check_energies(E))
