"""scikit-learn style wrappers around the sampling and series layers.

``X`` is a mass grid: shape ``(n_points,)`` for one mass per point or
``(n_points, k)`` for ``k`` masses per point.  ``fit`` draws (or prepares)
everything that does not depend on the masses, so one fitted Monte Carlo
estimator evaluates any number of grids on the same sample stream.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .analytic.series import reference_series, series_params_for
from .charpoly import SourceSpec, curve_from_spectra, sample_spectra
from .ensembles import EnsembleSpec, ProductSpec, spec_from_dict
from .errors import SpecValidationError, UnsupportedMassCount
from .mcmc import McmcConfig


def _coerce_spec(ensemble):
    if isinstance(ensemble, (EnsembleSpec, ProductSpec)):
        return ensemble
    if isinstance(ensemble, dict):
        return spec_from_dict(ensemble)
    raise SpecValidationError("ensemble must be an EnsembleSpec, ProductSpec or dict")


def _mass_grid(X) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[:, None]
    return check_array(X, dtype=None, ensure_min_features=1)


class MonteCarloCharPoly(BaseEstimator):
    """Monte Carlo average of products of characteristic polynomials.

    Parameters
    ----------
    ensemble : EnsembleSpec, ProductSpec or dict
        The random-matrix model.
    n_samples : int
        Number of Gram spectra drawn in ``fit``.
    random_state : int
        Seed of the sample stream; there is no entropy default.
    shards : int
        Deterministic split of the stream, see :func:`~rmtprod.charpoly.sample_spectra`.
    n_jobs : int
        Worker threads; does not change the result.
    mcmc : McmcConfig or dict, optional
        Chain settings for Metropolis-sampled ensembles.

    Attributes
    ----------
    spec_ : EnsembleSpec or ProductSpec
    spectra_ : ndarray of shape (n_samples, n)
    groups_ : ndarray or None
        Chain label of each sample for MCMC ensembles.
    """

    def __init__(self, ensemble=None, n_samples: int = 10_000, random_state: Optional[int] = None,
                 shards: int = 1, n_jobs: int = 1, mcmc=None):
        self.ensemble = ensemble
        self.n_samples = n_samples
        self.random_state = random_state
        self.shards = shards
        self.n_jobs = n_jobs
        self.mcmc = mcmc

    def fit(self, X=None, y=None):
        if self.random_state is None or not isinstance(self.random_state, (int, np.integer)):
            raise SpecValidationError("random_state must be an explicit integer seed")
        self.spec_ = _coerce_spec(self.ensemble)
        cfg = McmcConfig(**self.mcmc) if isinstance(self.mcmc, dict) else self.mcmc
        self.spectra_, self.groups_ = sample_spectra(
            self.spec_, int(self.n_samples), int(self.random_state), self.shards, cfg, self.n_jobs)
        return self

    def predict_curve(self, X):
        """Estimates with their covariance on the mass grid ``X``."""
        check_is_fitted(self, "spectra_")
        X = _mass_grid(X)
        self.spec_.check_mass_count(X.shape[1])
        sources = [SourceSpec(tuple(row)) for row in X]
        return curve_from_spectra(self.spectra_, self.groups_, sources, int(self.n_samples),
                                  int(self.random_state))

    def predict(self, X, return_std: bool = False):
        curve = self.predict_curve(X)
        return (curve.values, curve.stderrs) if return_std else curve.values


class SeriesCharPoly(BaseEstimator):
    """Closed-form ``k=1`` reference curve, up to an ``m``-independent constant.

    ``beta=1,4`` single ensembles use the parameter maps onto ``beta=2``.
    """

    def __init__(self, ensemble=None):
        self.ensemble = ensemble

    def fit(self, X=None, y=None):
        self.spec_ = _coerce_spec(self.ensemble)
        self.params_ = series_params_for(self.spec_)
        return self

    def predict(self, X):
        check_is_fitted(self, "spec_")
        X = _mass_grid(X)
        if X.shape[1] != 1:
            raise UnsupportedMassCount("the series reference covers one mass per point")
        return reference_series(self.spec_, X[:, 0])
