import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import eval_jacobi, eval_genlaguerre

from rmtprod.analytic import (SeriesParams, cl_series, jacobi_series, laguerre_series,
                              map_beta14, normalized_series, product_series)
from rmtprod.analytic.polynomials import jacobi_polynomial
from rmtprod.analytic.series import reference_leading_coefficient, series_log_coefficients
from rmtprod.ensembles import EnsembleSpec, Kind
from rmtprod.errors import SpecValidationError, UnsupportedMassCount


def _brute(n, nus, mus, kappas, g2, m):
    """Direct mpmath summation of the product series at 50 digits."""
    with mpmath.workdps(50):
        total = mpmath.mpf(0)
        for j in range(n + 1):
            t = (-mpmath.mpf(m) / g2) ** j / (mpmath.factorial(j) * mpmath.factorial(n - j))
            for nu in nus:
                t /= mpmath.factorial(nu + j)
            for nu, mu in zip(nus[len(nus) - len(mus) - len(kappas):], mus):
                t *= mpmath.rgamma(mu - n - nu - j)
            for nu, k in zip(nus[len(nus) - len(kappas):], kappas):
                t *= mpmath.gamma(n + k + nu + j + 1)
            total += t
        return float(total)


def test_laguerre_hand_values():
    assert laguerre_series(1, 0, 1.0, 0.0) == 1
    assert laguerre_series(1, 0, 1.0, 1.0) == 0
    for n, nu in [(3, 0), (5, 2), (8, 3)]:
        assert laguerre_series(n, nu, 1.7, 0.0) == pytest.approx(1 / (math.factorial(n) * math.factorial(nu)), rel=1e-15)


def test_cl_hand_values():
    for m in (-2.0, 0.0, 0.3, 5.0):
        assert cl_series(1, 0, 3.0, 1.0, m) == pytest.approx(1 - m, abs=1e-15)
    assert cl_series(3, 1, 7.5, 1.0, 0.0) == pytest.approx(1 / (6 * math.gamma(3.5)), rel=1e-14)
    # mu - n - nu = 0: the j = 0 term vanishes, the rest survive
    n, nu, mu = 2, 0, 2.0
    assert cl_series(n, nu, mu, 1.0, 0.0) == 0
    assert cl_series(n, nu, mu, 1.0, 1.0) == pytest.approx(_brute(n, (nu,), (mu,), (), 1.0, 1.0), abs=1e-15)


def test_jacobi_hand_values():
    for m in (0.0, 0.25, 1.0):
        assert jacobi_series(1, 0, 0.0, 1.0, m) == pytest.approx(1 - 2 * m, abs=1e-15)
    assert jacobi_series(3, 2, 1.5, 1.0, 0.0) == pytest.approx(math.gamma(7.5) / (6 * 2), rel=1e-14)


@pytest.mark.parametrize("n", [1, 3, 6, 12])
@pytest.mark.parametrize("nus,mus,kappas", [
    ((0,), (), ()), ((2,), (9.5,), ()), ((1,), (), (0.5,)),
    ((0, 1), (), ()), ((1, 0, 2), (30.0,), (1.5,)), ((0, 0), (4.0,), ()),
])
def test_product_series_matches_high_precision_sum(n, nus, mus, kappas):
    g2 = 1.3
    for m in (0.0, 0.4, 2.5, -1.0):
        ref = _brute(n, nus, mus, kappas, g2, m)
        got = product_series(SeriesParams(n, nus, mus, kappas, g2), m)
        scale = max(abs(_brute(n, nus, mus, kappas, g2, x)) for x in (0.0, m))
        assert abs(got - ref) <= 1e-13 * scale


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("kappa", [0.0, 1.5])
@pytest.mark.parametrize("nu", [0, 2])
def test_jacobi_proportional_to_classical(n, kappa, nu):
    g2 = 2.0
    grid = np.array([0.13, 0.41, 0.77, 1.23, 1.81])
    ours = np.array([jacobi_series(n, nu, kappa, g2, m) for m in grid])
    rec = jacobi_polynomial(n, kappa, nu, 2 * grid / g2 - 1)
    ratio = ours / rec
    assert np.max(np.abs(ratio / ratio[0] - 1)) < 1e-8
    np.testing.assert_allclose(rec, eval_jacobi(n, kappa, nu, 2 * grid / g2 - 1), rtol=1e-12)


@pytest.mark.parametrize("n,nu", [(1, 0), (4, 1), (9, 3)])
def test_laguerre_proportional_to_classical(n, nu):
    grid = np.array([0.2, 1.3, 3.7, 7.1])
    ratio = laguerre_series(n, nu, 1.0, grid) / eval_genlaguerre(n, nu, grid)
    np.testing.assert_allclose(ratio, 1 / math.factorial(n + nu), rtol=1e-11)


def test_reductions():
    m = np.array([0.0, 0.7, 3.0])
    np.testing.assert_array_equal(product_series(SeriesParams(5, (2,), gamma_sq_total=1.5), m),
                                  laguerre_series(5, 2, 1.5, m))
    np.testing.assert_array_equal(product_series(SeriesParams(5, (2,), kappa_list=(0.5,)), m),
                                  jacobi_series(5, 2, 0.5, 1.0, m))


@given(st.permutations([(0, None, None), (2, None, None), (1, 12.0, None), (3, 20.5, None),
                        (1, None, 0.5), (0, None, 2.0)]),
       st.floats(-3, 3, allow_nan=False))
def test_permutation_bitwise(perm, m):
    def build(factors):
        wl = [f for f in factors if f[1] is None and f[2] is None]
        cl = [f for f in factors if f[1] is not None]
        jac = [f for f in factors if f[2] is not None]
        return SeriesParams(5, tuple(f[0] for f in wl + cl + jac), tuple(f[1] for f in cl),
                            tuple(f[2] for f in jac))
    base = [(0, None, None), (2, None, None), (1, 12.0, None), (3, 20.5, None),
            (1, None, 0.5), (0, None, 2.0)]
    assert product_series(build(perm), m) == product_series(build(base), m)


def test_complex_mass():
    p = SeriesParams(4, (1,), (), (0.5,))
    z = 0.3 + 0.8j
    got = product_series(p, z)
    expect = complex(sum(
        mpmath.gamma(4 + 0.5 + 1 + j + 1) * (-mpmath.mpc(z)) ** j
        / (mpmath.factorial(j) * mpmath.factorial(4 - j) * mpmath.factorial(1 + j))
        for j in range(5)))
    assert abs(got - expect) <= 1e-13 * abs(expect)


def test_large_n_normalized_finite():
    p = SeriesParams(400, (1,), (), (400.0,))
    vals = normalized_series(p, np.array([0.0, 1e-7, 1e-6]))
    assert vals[0] == 1 and np.all(np.isfinite(vals))


def test_log_coefficients_agree_with_exact_route():
    p = SeriesParams(10, (1, 0), (25.0,), (1.5,), 0.8)
    logc, sign = series_log_coefficients(p)
    for m in (0.1, 1.0):
        w = -m / p.gamma_sq_total
        direct = math.fsum(s * math.exp(lc) * w ** j for j, (lc, s) in enumerate(zip(logc, sign)))
        assert direct == pytest.approx(product_series(p, m), rel=1e-9)


def test_heavy_tail_degeneration_rate():
    # CL series with m -> m/mu approaches the Laguerre series at rate O(1/mu)
    grid = np.linspace(0, 8, 9)
    lag = normalized_series(SeriesParams(4, (1,)), grid)
    errs = []
    for mu in (1e5, 1e6):
        cl = normalized_series(SeriesParams(4, (1,), mu_list=(mu,)), grid / mu)
        errs.append(np.max(np.abs(cl - lag) / np.maximum(1, np.abs(lag))))
    assert errs[1] < 1e-4
    assert errs[1] / errs[0] == pytest.approx(0.1, rel=0.05)


def test_map_beta14_examples():
    p = SeriesParams(3, (0,))
    assert map_beta14(2, Kind.WISHART_LAGUERRE, p, 1.5) == (p, 1.5)
    assert map_beta14(1, Kind.WISHART_LAGUERRE, p, 1.5) == (p, 3.0)
    pj = SeriesParams(3, (0,), kappa_list=(2.0,))
    assert map_beta14(4, Kind.JACOBI, pj, 0.5)[0].kappa_list == (1.5,)
    pc = SeriesParams(3, (0,), mu_list=(10.0,))
    # beta=1: gamma=1, gamma_tilde=2 -> 2 mu - 1
    assert map_beta14(1, Kind.CAUCHY_LORENTZ, pc, 0.5)[0].mu_list == (19.0,)
    with pytest.raises(UnsupportedMassCount):
        map_beta14(1, Kind.WISHART_LAGUERRE, p, [1.0, 2.0])


def test_leading_coefficient():
    spec = EnsembleSpec("WishartLaguerre", 2, 4, nu=1)
    # S has leading coefficient 1/(n! (n+nu)!) times (-1)^n
    assert reference_leading_coefficient(spec) == pytest.approx(1 / (24 * 120), rel=1e-14)


def test_validation():
    with pytest.raises(SpecValidationError):
        SeriesParams(0, (0,))
    with pytest.raises(SpecValidationError):
        SeriesParams(2, (0.5,))
    with pytest.raises(SpecValidationError):
        SeriesParams(2, (0,), (3.0,), (1.0,))
