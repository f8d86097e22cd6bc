import math

import numpy as np
import pytest
from scipy.special import eval_genlaguerre, eval_jacobi

from rmtprod.analytic.polynomials import (christoffel_darboux_laguerre, jacobi_polynomial,
                                          monic_laguerre)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10])
@pytest.mark.parametrize("nu", [0, 1, 3])
def test_monic_laguerre_vs_scipy(n, nu):
    x = np.linspace(0, 12, 13)
    g2 = 1.7
    # monic in x: (-1)^n n! G^n L_n^nu(x/G)
    ref = (-1) ** n * math.factorial(n) * g2 ** n * eval_genlaguerre(n, nu, x / g2)
    np.testing.assert_allclose(monic_laguerre(n, nu, x, g2), ref, rtol=1e-10, atol=1e-10 * g2 ** n * math.factorial(n))


@pytest.mark.parametrize("n", [0, 1, 2, 7])
@pytest.mark.parametrize("a,b", [(0.0, 0.0), (1.5, 2.0), (-0.5, 0.5)])
def test_jacobi_vs_scipy(n, a, b):
    x = np.linspace(-1, 1, 11)
    np.testing.assert_allclose(jacobi_polynomial(n, a, b, x), eval_jacobi(n, a, b, x), rtol=1e-12, atol=1e-12)


def test_christoffel_darboux_frozen_oracle():
    # exact E[det(H - m1) det(H - m2)] for 2x2 complex Wishart, nu=0, Gamma=1,
    # integrated symbolically over the joint eigenvalue density
    assert christoffel_darboux_laguerre(2, 0, 1.0, 1.0, 2.0) == pytest.approx(6.0, rel=1e-14)
    assert christoffel_darboux_laguerre(2, 0, 1.0, 0.5, 3.0) == pytest.approx(-0.25, rel=1e-13)


def test_christoffel_darboux_symmetric():
    a = christoffel_darboux_laguerre(3, 1, 2.0, 0.4, 5.0)
    b = christoffel_darboux_laguerre(3, 1, 2.0, 5.0, 0.4)
    assert a == pytest.approx(b, rel=1e-14)
