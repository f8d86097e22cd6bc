import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from rmtprod import EnsembleSpec, MonteCarloCharPoly, SeriesCharPoly, estimate_Z_curve
from rmtprod.analytic import laguerre_series
from rmtprod.errors import SpecValidationError, UnsupportedMassCount

from conftest import SEED

SPEC = EnsembleSpec("WishartLaguerre", 2, 2, nu=1)


def test_params_and_clone():
    est = MonteCarloCharPoly(SPEC, n_samples=500, random_state=SEED)
    assert est.get_params()["n_samples"] == 500
    c = clone(est).set_params(n_samples=300)
    assert c.n_samples == 300 and c.ensemble == SPEC


def test_predict_matches_functional_api():
    grid = [0.5, 1.0, 2.0]
    est = MonteCarloCharPoly(SPEC, n_samples=2000, random_state=SEED).fit()
    values, std = est.predict(grid, return_std=True)
    curve = estimate_Z_curve(SPEC, grid, 2000, SEED)
    np.testing.assert_array_equal(values, curve.values)
    np.testing.assert_array_equal(std, curve.stderrs)


def test_dict_ensemble_and_two_masses():
    est = MonteCarloCharPoly(SPEC.to_dict(), n_samples=200, random_state=1).fit()
    assert est.predict([[0.5, 1.0], [1.0, 2.0]]).shape == (2,)


def test_requires_seed_and_fit():
    with pytest.raises(SpecValidationError):
        MonteCarloCharPoly(SPEC).fit()
    with pytest.raises(NotFittedError):
        MonteCarloCharPoly(SPEC, random_state=1).predict([1.0])
    with pytest.raises(NotFittedError):
        SeriesCharPoly(SPEC).predict([1.0])


def test_series_estimator():
    est = SeriesCharPoly(SPEC).fit()
    grid = np.array([0.0, 0.5, 3.0])
    np.testing.assert_allclose(est.predict(grid), laguerre_series(2, 1, 1.0, grid), rtol=1e-15)
    with pytest.raises(UnsupportedMassCount):
        est.predict([[0.5, 1.0]])
