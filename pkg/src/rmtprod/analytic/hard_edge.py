r"""Hard-edge limit of the ``k=1`` product average and its finite-``n`` approach.

The limit function is :math:`\sum_{j\ge0} (-x)^j / (j!\prod_a(\nu_a+j)!)`; for
one factor it is :math:`x^{-\nu/2}J_\nu(2\sqrt{x})`.

A finite-``n`` product series approaches it when the mass is scaled as
``m = Gamma^2 x / [n prod_a(mu_a - n) prod_a(kappa_a + n)]`` with
``mu_a = n (mu_hat_a + 1)`` and ``kappa_a = n (kappa_hat_a - 1)`` held at
fixed ``mu_hat``, ``kappa_hat``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..errors import NonConvergent, SpecValidationError
from .series import SeriesParams, normalized_series

TERM_TOL = 1e-16
MAX_TERMS = 10_000


def hard_edge_terms(nu_list, x: float, n_terms: int) -> np.ndarray:
    """The first ``n_terms`` terms of the limit series at ``x``."""
    j = np.arange(n_terms, dtype=float)
    logt = -gammaln(j + 1) - sum(gammaln(nu + j + 1) for nu in nu_list)
    if x == 0:
        return np.where(j == 0, np.exp(logt), 0.0)
    return (-1.0) ** j * np.exp(logt + j * math.log(x))


def hard_edge_limit(nu_list, x: float, tol: float = TERM_TOL, max_terms: int = MAX_TERMS) -> float:
    """Limit function at ``x >= 0``, summed until a term drops below ``tol`` relative to the largest.

    Raises :class:`~rmtprod.errors.NonConvergent` when ``max_terms`` terms do
    not reach the tolerance.
    """
    nu_list = tuple(int(v) for v in nu_list)
    if not nu_list or any(v < 0 for v in nu_list):
        raise SpecValidationError("nu_list needs non-negative integers")
    if x < 0:
        raise SpecValidationError("hard_edge_limit needs x >= 0")
    n_terms = 64
    while True:
        terms = hard_edge_terms(nu_list, x, min(n_terms, max_terms))
        mags = np.abs(terms)
        peak = mags.max()
        # terms decay monotonically once j exceeds x^(1/(L+1))
        below = np.nonzero(mags <= tol * peak)[0]
        below = below[below > x ** (1.0 / (len(nu_list) + 1))]
        if below.size:
            return math.fsum(terms[: below[0] + 1])
        if n_terms >= max_terms:
            raise NonConvergent(f"hard-edge series not converged after {max_terms} terms at x={x}")
        n_terms *= 4


def scaled_params(nu_list, n: int, mu_hat=(), kappa_hat=(), gamma_sq: float = 1.0) -> SeriesParams:
    """Series parameters at size ``n`` for fixed ``mu_hat``/``kappa_hat``."""
    return SeriesParams(
        n=n,
        nu_list=tuple(nu_list),
        mu_list=tuple(n * (mh + 1.0) for mh in mu_hat),
        kappa_list=tuple(n * (kh - 1.0) for kh in kappa_hat),
        gamma_sq_total=gamma_sq,
    )


def mass_scale(n: int, mu_hat=(), kappa_hat=(), gamma_sq: float = 1.0) -> float:
    """``m / x`` at size ``n``."""
    return gamma_sq / (n * float(np.prod([n * mh for mh in mu_hat])) * float(np.prod([n * kh for kh in kappa_hat])))


@dataclass(frozen=True)
class HardEdgeScan:
    n_list: tuple
    x_grid: np.ndarray
    distances: np.ndarray
    finite_n: np.ndarray
    limit: np.ndarray

    @property
    def strictly_decreasing(self) -> bool:
        d = self.distances
        return bool(np.all(np.diff(d) < 0))

    @property
    def final_distance(self) -> float:
        return float(self.distances[-1])


def hard_edge_scan(nu_list, n_list, x_grid, mu_hat=(), kappa_hat=(), gamma_sq: float = 1.0) -> HardEdgeScan:
    """Sup-distance between the scaled finite-``n`` series and the limit on ``x_grid``.

    Both curves are normalised to agree at ``x = 0``.

    Parameters
    ----------
    nu_list : sequence of int
        One ``nu`` per factor, ordered Wishart, Cauchy-Lorentz, Jacobi.
    n_list : sequence of int
        Ascending matrix sizes.
    x_grid : array_like
        Non-negative scaled masses.
    mu_hat, kappa_hat : sequence of float
        Fixed scaled exponents of the Cauchy-Lorentz and Jacobi factors.
    gamma_sq : float
        Product of the factor scales.
    """
    n_list = tuple(int(n) for n in n_list)
    if list(n_list) != sorted(n_list):
        raise SpecValidationError("n_list must be ascending")
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any(x_grid < 0):
        raise SpecValidationError("x_grid must be non-negative")
    if any(mh <= 0 for mh in mu_hat) or any(kh <= 0 for kh in kappa_hat):
        raise SpecValidationError("mu_hat and kappa_hat must be positive")
    limit = np.array([hard_edge_limit(nu_list, x) for x in x_grid])
    limit0 = hard_edge_limit(nu_list, 0.0)
    rows, dists = [], []
    for n in n_list:
        p = scaled_params(nu_list, n, mu_hat, kappa_hat, gamma_sq)
        scale = mass_scale(n, mu_hat, kappa_hat, gamma_sq)
        vals = np.asarray(normalized_series(p, x_grid * scale), dtype=float) * limit0
        rows.append(vals)
        dists.append(float(np.max(np.abs(vals - limit))) if x_grid.size else 0.0)
    return HardEdgeScan(n_list, x_grid, np.array(dists), np.array(rows), limit)
