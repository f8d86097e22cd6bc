import math

import mpmath
import numpy as np
import pytest
from scipy.special import jv

from rmtprod.analytic.hard_edge import (hard_edge_limit, hard_edge_scan, hard_edge_terms,
                                        mass_scale, scaled_params)
from rmtprod.errors import NonConvergent, SpecValidationError


@pytest.mark.parametrize("nu_list", [(0,), (2,), (1, 3), (0, 0, 1)])
def test_value_at_zero(nu_list):
    assert hard_edge_limit(nu_list, 0.0) == pytest.approx(1 / math.prod(math.factorial(v) for v in nu_list), rel=1e-15)


@pytest.mark.parametrize("nu", [0, 1, 3])
def test_bessel_oracle(nu):
    for x in np.linspace(0.01, 10, 40):
        ref = x ** (-nu / 2) * jv(nu, 2 * math.sqrt(x))
        assert abs(hard_edge_limit((nu,), x) - ref) < 1e-12


def test_two_factor_brute_force():
    for x in (0.0, 0.5, 3.0, 10.0):
        with mpmath.workdps(40):
            ref = mpmath.nsum(lambda j: (-x) ** j / mpmath.factorial(j) ** 3, [0, mpmath.inf])
        assert abs(hard_edge_limit((0, 0), x) - float(ref)) < 1e-12


@pytest.mark.parametrize("nu_list", [(0,), (1,), (0, 0), (2, 1)])
def test_truncation_bounded_by_first_omitted_term(nu_list):
    for x in (0.5, 4.0, 10.0):
        ref = math.fsum(hard_edge_terms(nu_list, x, 10_000))
        terms = hard_edge_terms(nu_list, x, 200)
        start = int(math.ceil(x ** (1 / (len(nu_list) + 1)))) + 1
        for k in range(start, 40):
            partial = math.fsum(terms[:k])
            # one ulp of the reference for rounding in the sums
            assert abs(partial - ref) <= abs(terms[k]) * (1 + 1e-9) + 2 * np.spacing(abs(ref))


def test_guards():
    with pytest.raises(SpecValidationError):
        hard_edge_limit((0,), -1.0)
    with pytest.raises(NonConvergent):
        hard_edge_limit((0,), 1e4, max_terms=64)


def test_scaling_helpers():
    p = scaled_params((0, 1), 10, mu_hat=(), kappa_hat=(2.0,), gamma_sq=2.0)
    assert p.kappa_list == (10.0,)
    assert mass_scale(10, kappa_hat=(2.0,), gamma_sq=2.0) == pytest.approx(2.0 / (10 * 20))


def test_zero_grid_distance():
    scan = hard_edge_scan((0,), [50, 100], [0.0])
    np.testing.assert_array_equal(scan.distances, [0.0, 0.0])


@pytest.mark.parametrize("nu", [0, 1])
def test_single_wishart_converges(nu):
    scan = hard_edge_scan((nu,), [50, 100, 200, 400], np.linspace(0, 10, 101))
    assert scan.strictly_decreasing
    assert scan.final_distance < 1e-2
    # O(1/n) approach
    assert scan.distances[-2] / scan.distances[-1] == pytest.approx(2.0, rel=0.05)


def test_mixed_product_smoke():
    scan = hard_edge_scan((0, 1), [200], np.linspace(0, 10, 21), kappa_hat=(2.0,))
    assert np.isfinite(scan.final_distance)


def test_scan_validation():
    with pytest.raises(SpecValidationError):
        hard_edge_scan((0,), [100, 50], [0.0])
    with pytest.raises(SpecValidationError):
        hard_edge_scan((0,), [50], [-1.0])
