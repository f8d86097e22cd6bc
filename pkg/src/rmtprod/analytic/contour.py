r"""Trapezoid quadrature of the dual contour integrals.

``k = 1``: the average is a single contour integral around the origin,

=================  ==================================================================
kind               integrand :math:`f(z)`, value :math:`\frac{1}{2\pi i}\oint f\,dz`
=================  ==================================================================
WishartLaguerre    z^{-(n+nu+1)} (z-m)^n exp(z/Gamma^2)
CauchyLorentz      z^{-(n+nu+1)} (Gamma^2+z)^{mu-n-1} (z-m)^n
Jacobi             z^{-(n+nu+1)} (Gamma^2-z)^{-(n+kappa+1)} (z-m)^n
=================  ==================================================================

The trapezoid rule on a circle converges geometrically for these integrands.
Cauchy-Lorentz and Jacobi have a branch point at ``|z| = Gamma^2`` that the
circle must not reach, which is why ``Gamma > 1`` is required for them.

``k = 2``, ``beta = 2``: the average is an integral over ``U(2)``.  After
diagonalisation the angular Haar average of ``det(U - diag(m1, m2))^n`` is
exactly ``int_0^1 ((1-t) a + t b)^n dt`` with
``a = (z1-m1)(z2-m2)`` and ``b = (z1-m2)(z2-m1)``; it is evaluated with
Gauss-Legendre nodes, which are exact for this polynomial in ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize_scalar

from ..ensembles import Kind
from ..errors import CoincidentMasses, PoleOnContour, SpecValidationError, UnsupportedBeta
from .series import SeriesParams

POLE_GAP = 1e-6


@dataclass(frozen=True)
class QuadratureConfig:
    """Trapezoid nodes per angle and contour radius.

    ``radius=None`` picks, for ``k=1``, the radius that minimises the peak
    modulus of the integrand on the circle (limiting cancellation), kept
    far enough inside ``Gamma^2`` for geometric convergence; for ``k=2`` it
    means the unit circle.
    """

    nodes: int = 256
    radius: Optional[float] = None

    def __post_init__(self):
        if self.nodes < 16:
            raise SpecValidationError("quadrature needs at least 16 nodes")
        if self.radius is not None and not self.radius > 0:
            raise SpecValidationError("radius must be positive")


def _single(params: SeriesParams, kind: Kind):
    if len(params.nu_list) != 1:
        raise SpecValidationError("contour quadrature takes single-ensemble parameters")
    nu = params.nu_list[0]
    mu = params.mu_list[0] if params.mu_list else None
    kappa = params.kappa_list[0] if params.kappa_list else None
    if kind is Kind.CAUCHY_LORENTZ and mu is None:
        raise SpecValidationError("CauchyLorentz contour needs mu")
    if kind is Kind.JACOBI and kappa is None:
        raise SpecValidationError("Jacobi contour needs kappa")
    return nu, mu, kappa


def _check_radius(kind, g2, radius):
    if kind is Kind.WISHART_LAGUERRE:
        return
    if not g2 > 1:
        raise SpecValidationError(f"{kind.value} contour quadrature requires Gamma > 1")
    if radius is None:
        return
    if abs(radius - g2) < POLE_GAP:
        raise PoleOnContour(f"radius {radius} lies on the singularity at |z| = Gamma^2 = {g2}")
    if radius > g2:
        raise SpecValidationError(f"radius {radius} encloses the singularity at |z| = Gamma^2 = {g2}")


def _log_integrand_k1(kind, n, nu, mu, kappa, g2, m):
    def logf(z):
        with np.errstate(divide="ignore"):
            out = -(n + nu + 1) * np.log(z) + n * np.log(z - m + 0j)
        if kind is Kind.WISHART_LAGUERRE:
            return out + z / g2
        if kind is Kind.CAUCHY_LORENTZ:
            return out + (mu - n - 1) * np.log(g2 + z)
        return out - (n + kappa + 1) * np.log(g2 - z)
    return logf


def _circle(radius, nodes):
    return radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)


def _auto_radius(logf, nodes, r_max):
    def peak(log_r):
        z = _circle(np.exp(log_r), nodes)
        return float(np.max((logf(z) + np.log(z)).real))
    lo = np.log(1e-4)
    res = minimize_scalar(peak, bounds=(lo, np.log(r_max)), method="bounded",
                          options={"xatol": 1e-6})
    return float(np.exp(res.x))


def contour_quadrature_k1(kind, params: SeriesParams, m, cfg: Optional[QuadratureConfig] = None) -> complex:
    """``(1/2 pi i)`` times the ``k=1`` contour integral, by the trapezoid rule.

    For Wishart-Laguerre the exact value is ``n! Gamma^(-2 nu)`` times
    :func:`~rmtprod.analytic.series.laguerre_series`; for the other kinds it
    is proportional to the corresponding series with an ``m``-independent
    constant.
    """
    kind = Kind(kind)
    cfg = cfg or QuadratureConfig()
    n, g2 = params.n, params.gamma_sq_total
    nu, mu, kappa = _single(params, kind)
    _check_radius(kind, g2, cfg.radius)
    logf = _log_integrand_k1(kind, n, nu, mu, kappa, g2, m)
    radius = cfg.radius
    if radius is None:
        if kind is Kind.WISHART_LAGUERRE:
            r_max = 1e3 * max(1.0, g2, abs(m))
        else:
            # aliasing from the outer singularity of order p decays like N^p (r/Gamma^2)^N
            order = n + kappa + 1 if kind is Kind.JACOBI else n + 1 - mu
            order = max(1.0, order)
            r_max = g2 * np.exp(-(40.0 + order * np.log(cfg.nodes)) / cfg.nodes)
        radius = _auto_radius(logf, cfg.nodes, r_max)
    z = _circle(radius, cfg.nodes)
    logs = logf(z) + np.log(z)
    shift = float(np.max(logs.real))
    return complex(np.exp(shift) * np.mean(np.exp(logs - shift)))


def _weight_k2(kind, n, nu, mu, kappa, g2, z):
    base = z ** (-(n + nu))
    if kind is Kind.WISHART_LAGUERRE:
        return base * np.exp(z / g2)
    if kind is Kind.CAUCHY_LORENTZ:
        return base * (g2 + z) ** (mu - 2 - n)
    return base * (g2 - z) ** (-kappa - 2 - n)


def cbe2_quadrature(beta_tilde, kind, params: SeriesParams, masses,
                    cfg: Optional[QuadratureConfig] = None) -> complex:
    """Normalised ``k=2`` average over the dual circular ensemble.

    Two-angle trapezoid rule with the Vandermonde factor
    ``|e^{i t1} - e^{i t2}|^2``, the kind-specific eigenvalue weights and the
    exact angular average of the determinant insertion, divided by the same
    quadrature with the insertion replaced by one.  Only the ``beta=2`` dual
    (``beta_tilde = 2``) is implemented.
    """
    if float(beta_tilde) != 2.0:
        raise UnsupportedBeta("k=2 circular-ensemble quadrature is implemented for beta_tilde = 2 only")
    kind = Kind(kind)
    cfg = cfg or QuadratureConfig()
    m1, m2 = masses
    if abs(m1 - m2) < 1e-8:
        raise CoincidentMasses(f"masses {m1} and {m2} coincide")
    m1, m2 = sorted((m1, m2), key=lambda v: (np.real(v), np.imag(v)))
    n, g2 = params.n, params.gamma_sq_total
    nu, mu, kappa = _single(params, kind)
    radius = 1.0 if cfg.radius is None else cfg.radius
    _check_radius(kind, g2, radius)

    z = _circle(radius, cfg.nodes)
    z1, z2 = z[:, None], z[None, :]
    # analytic continuation of |z1 - z2|^2 off the unit circle
    vandermonde = -(z1 - z2) ** 2 / (z1 * z2)
    w = _weight_k2(kind, n, nu, mu, kappa, g2, z)
    base = vandermonde * w[:, None] * w[None, :]

    t, wt = leggauss(n // 2 + 1)
    t, wt = 0.5 * (t + 1), 0.5 * wt
    a = (z1 - m1) * (z2 - m2)
    b = (z1 - m2) * (z2 - m1)
    insertion = sum(wi * ((1 - ti) * a + ti * b) ** n for ti, wi in zip(t, wt))
    return complex(np.sum(base * insertion) / np.sum(base))
