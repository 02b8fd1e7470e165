"""scikit-learn compatible wrappers.

``MirrorSpectrum`` maps a column of frequencies to the particle spectrum,
so it can sit inside a ``Pipeline``; ``ThermalTailFit`` fits temperature
and graybody plateau to an observed spectrum tail.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import DomainError
from .quadrature import QuadratureConfig
from .spectrum import CLOSED, METHODS, SpectrumSeries, spectrum_sweep, thermal_fit, total_count
from .trajectory import MirrorParams


def _omega_column(X):
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single column of frequencies, got {X.shape[1]} columns")
    omega = X[:, 0]
    if np.any(omega <= 0):
        raise ValueError("frequencies must be > 0")
    return omega


class MirrorSpectrum(TransformerMixin, BaseEstimator):
    """Transformer from frequencies ``omega`` (one column) to ``N_omega``.

    Parameters
    ----------
    kappa, g : float
        Mirror scales.
    method : {"closed_form", "exact_quadrature"}
    quadrature : QuadratureConfig, optional
    max_workers : int, optional
        Thread cap for exact sweeps (defaults to ``MIRRORSPEC_THREADS``).
    """

    def __init__(self, kappa=1.0, g=1e6, method=CLOSED, quadrature=None, max_workers=None):
        self.kappa = kappa
        self.g = g
        self.method = method
        self.quadrature = quadrature
        self.max_workers = max_workers

    def fit(self, X=None, y=None):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method!r}")
        self.params_ = MirrorParams(self.kappa, self.g)
        self.quadrature_ = self.quadrature or QuadratureConfig()
        if X is not None:
            _omega_column(X)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        omega = _omega_column(X)
        series = spectrum_sweep(omega, self.params_, self.method, self.quadrature_, self.max_workers)
        self.last_series_ = series
        return series.n_omega[:, None]

    def total_count(self):
        check_is_fitted(self, "params_")
        return total_count(self.params_, self.quadrature_, self.method, self.max_workers)


class ThermalTailFit(RegressorMixin, BaseEstimator):
    """Fit ``N = plateau / (exp(omega / T) - 1)`` to the tail of a spectrum.

    After ``fit``: ``temperature_``, ``plateau_``, ``fit_residual_``, ``window_``.
    """

    def __init__(self, window=None):
        self.window = window

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        if X.shape[1] != 1:
            raise ValueError("expected a single column of frequencies")
        order = np.argsort(X[:, 0], kind="stable")
        series = SpectrumSeries(X[order, 0], y[order], np.zeros_like(y), CLOSED)
        res = thermal_fit(series, self.window)
        self.temperature_ = res.temperature
        self.plateau_ = res.plateau
        self.fit_residual_ = res.fit_residual
        self.window_ = res.window
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "temperature_")
        omega = _omega_column(X)
        with np.errstate(over="ignore"):
            return self.plateau_ / np.expm1(omega / self.temperature_)
