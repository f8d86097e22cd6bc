r"""Hypergeometric polynomial series for single ensembles and products.

For a product of Wishart-Laguerre, Cauchy-Lorentz and Jacobi factors the
``beta=2``, ``k=1`` average is proportional to

.. math::

    S(m) = \sum_{j=0}^{n}
        \frac{\prod_a \Gamma(n+\kappa_a+\nu_a+j+1)}
             {j!\,(n-j)!\,\prod_a(\nu_a+j)!\,\prod_a\Gamma(\mu_a-n-\nu_a-j)}
        \left(-\frac{m}{\Gamma^2}\right)^j ,

with ``Gamma^2`` the product of all factor scales.  The canonical value of
every function here is this bare sum, without any prefactor.

Parameter lists follow the factor order Wishart-Laguerre, Cauchy-Lorentz,
Jacobi: ``nu_list`` has one entry per factor, ``mu_list`` one per
Cauchy-Lorentz factor and ``kappa_list`` one per Jacobi factor.  By default
the ``nu`` inside a ``mu``/``kappa`` Gamma function is the one of the same
factor (``nu_mode="per-factor"``); ``nu_mode="uniform"`` uses ``nu_list[0]``
everywhere instead.

The ``j = 0`` coefficient comes from ``gammaln`` with an explicit sign; the
ratios of consecutive coefficients are exact rationals, so cancellation
between terms costs no accuracy.  ``1/Gamma`` at non-positive integers is
exactly zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, gammasgn

from ..algebra import as_dyson
from ..ensembles import Kind, ProductSpec
from ..errors import SpecValidationError, UnsupportedBeta, UnsupportedMassCount

NU_MODES = ("per-factor", "uniform")


@dataclass(frozen=True)
class SeriesParams:
    n: int
    nu_list: tuple
    mu_list: tuple = ()
    kappa_list: tuple = ()
    gamma_sq_total: float = 1.0
    nu_mode: str = "per-factor"

    def __post_init__(self):
        for name in ("nu_list", "mu_list", "kappa_list"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise SpecValidationError("n must be a positive integer")
        if len(self.nu_list) < 1:
            raise SpecValidationError("nu_list needs one entry per factor")
        if len(self.mu_list) + len(self.kappa_list) > len(self.nu_list):
            raise SpecValidationError("more mu/kappa entries than factors in nu_list")
        if any(int(nu) != nu or nu < 0 for nu in self.nu_list):
            raise SpecValidationError("nu values must be non-negative integers")
        if not self.gamma_sq_total > 0:
            raise SpecValidationError("gamma_sq_total must be positive")
        if self.nu_mode not in NU_MODES:
            raise SpecValidationError(f"nu_mode must be one of {NU_MODES}")

    @property
    def n_wishart(self) -> int:
        return len(self.nu_list) - len(self.mu_list) - len(self.kappa_list)

    def factor_groups(self):
        """Canonically sorted ``(wl_nus, cl_pairs, j_pairs)``.

        Each pair is ``(nu_of_gamma_argument, nu_of_factorial, exponent)``.
        Sorting makes the result independent of factor order within a kind.
        """
        L_wl, L_cl = self.n_wishart, len(self.mu_list)
        nus = [int(v) for v in self.nu_list]
        bare = lambda own: nus[0] if self.nu_mode == "uniform" else own
        wl = sorted(nus[:L_wl])
        cl = sorted((bare(nu), nu, float(mu)) for nu, mu in zip(nus[L_wl:L_wl + L_cl], self.mu_list))
        jac = sorted((bare(nu), nu, float(k)) for nu, k in zip(nus[L_wl + L_cl:], self.kappa_list))
        return wl, cl, jac


def _reciprocal_gamma_terms(args):
    """``log|1/Gamma(x)|`` and sign, with exact zeros at the poles."""
    args = np.asarray(args, dtype=float)
    pole = (args <= 0) & (args == np.round(args))
    safe = np.where(pole, 0.5, args)
    return -gammaln(safe), np.where(pole, 0.0, gammasgn(safe))


def series_log_coefficients(p: SeriesParams):
    """``log|c_j|`` and ``sign(c_j)`` of the polynomial in ``w = -m/Gamma^2``."""
    n = p.n
    j = np.arange(n + 1, dtype=float)
    logc = -gammaln(j + 1) - gammaln(n - j + 1)
    sign = np.ones(n + 1)
    wl, cl, jac = p.factor_groups()
    for nu in wl:
        logc = logc - gammaln(nu + j + 1)
    for bare, nu, mu in cl:
        lr, sr = _reciprocal_gamma_terms(mu - n - bare - j)
        logc = logc - gammaln(nu + j + 1) + lr
        sign = sign * sr
    for bare, nu, kappa in jac:
        arg = n + kappa + bare + j + 1
        if np.any((arg <= 0) & (arg == np.round(arg))):
            raise SpecValidationError("Jacobi Gamma function hits a pole")
        logc = logc - gammaln(nu + j + 1) + gammaln(arg)
        sign = sign * gammasgn(arg)
    return logc, sign


@lru_cache(maxsize=256)
def _ratio_coefficients(p: SeriesParams):
    """Integers ``N_j`` and ``D`` with ``c_j / c_0 = N_j / D``, exactly.

    Consecutive coefficients differ by a rational factor, so the ratios are
    exact for any float parameters (floats are dyadic rationals).  Returns
    ``None`` when ``c_0 = 0``; then every coefficient vanishes.
    """
    n = p.n
    wl, cl, jac = p.factor_groups()
    nus = list(wl) + [nu for _, nu, _ in cl] + [nu for _, nu, _ in jac]
    for bare, _, kappa in jac:
        arg = n + kappa + bare + 1
        if arg <= 0 and arg == round(arg):
            raise SpecValidationError("Jacobi Gamma function hits a pole")
    for bare, _, mu in cl:
        x0 = mu - n - bare
        if x0 <= 0 and x0 == round(x0):
            return None
    q = [Fraction(1)]
    for j in range(n):
        r = Fraction(n - j, j + 1)
        for nu in nus:
            r /= nu + j + 1
        for bare, _, mu in cl:
            # 1/Gamma(x - 1) = (x - 1)/Gamma(x)
            r *= Fraction(mu) - (n + bare + j + 1)
        for bare, _, kappa in jac:
            r *= Fraction(kappa) + (n + bare + j + 1)
        q.append(q[-1] * r)
    D = math.lcm(*(f.denominator for f in q))
    return tuple(f.numerator * (D // f.denominator) for f in q), D


def _leading_log(p: SeriesParams):
    logc, sign = series_log_coefficients(p)
    return float(logc[0]), float(sign[0])


def _exact_ratio(num: int, den: int):
    """``num / den`` as ``(mantissa, exponent)`` with a correctly rounded mantissa."""
    if num == 0:
        return 0.0, 0
    shift = num.bit_length() - den.bit_length()
    if shift > 0:
        den <<= shift
    else:
        num <<= -shift
    return num / den, shift


def _horner(coeffs, D, m, gamma_sq):
    """``sum_j (N_j / D) w^j`` at ``w = -m/Gamma^2`` in exact integer arithmetic.

    Returns ``(mantissa, exponent)`` per real/imaginary part.
    """
    g = Fraction(gamma_sq)
    mr, mi = Fraction(float(np.real(m))), Fraction(float(np.imag(m)))
    # w = -(ar + i ai)/b with integers
    b = mr.denominator * mi.denominator * g.numerator
    ar = -mr.numerator * mi.denominator * g.denominator
    ai = -mi.numerator * mr.denominator * g.denominator
    acc_r, acc_i, bpow = 0, 0, 1
    for N in reversed(coeffs):
        acc_r, acc_i = acc_r * ar - acc_i * ai + N * bpow, acc_r * ai + acc_i * ar
        bpow *= b
    den = D * (bpow // b)
    return _exact_ratio(acc_r, den), (_exact_ratio(acc_i, den) if ai else None)


def _scaled(mant_exp, log_c0, sign_c0):
    mant, exp = mant_exp
    if mant == 0:
        return 0.0
    k0 = math.floor(log_c0 / math.log(2.0))
    f0 = math.exp(log_c0 - k0 * math.log(2.0))
    try:
        return math.ldexp(sign_c0 * f0 * mant, exp + k0)
    except OverflowError:
        return math.copysign(math.inf, sign_c0 * mant)


def _evaluate(p: SeriesParams, m, normalized: bool):
    ratio = _ratio_coefficients(p)
    if ratio is None:
        if normalized:
            raise SpecValidationError("series vanishes at m = 0")
        return 0.0
    log_c0, sign_c0 = (0.0, 1.0) if normalized else _leading_log(p)
    re, im = _horner(*ratio, m, p.gamma_sq_total)
    if im is None:
        return _scaled(re, log_c0, sign_c0)
    return complex(_scaled(re, log_c0, sign_c0), _scaled(im, log_c0, sign_c0))


def _eval(p, m, normalized=False):
    if np.ndim(m) == 0:
        return _evaluate(p, m, normalized)
    vals = [_evaluate(p, mm, normalized) for mm in np.ravel(m)]
    return np.array(vals).reshape(np.shape(m))


def product_series(p: SeriesParams, m):
    """Bare product series at ``m`` (scalar or array).

    The ratios ``c_j/c_0`` are exact rationals and the polynomial is summed
    in integer arithmetic, so the only rounding besides the final one is in
    the log-Gamma prefactor ``c_0``.  Values are accurate to ~1e-15 relative
    even where the terms cancel heavily.
    """
    return _eval(p, m)


def normalized_series(p: SeriesParams, m):
    """``S(m) / S(0)``, without forming ``S(0)`` (which under- or overflows at large ``n``)."""
    return _eval(p, m, normalized=True)


def laguerre_series(n, nu, gamma_sq, m):
    """``sum_j (-m/Gamma^2)^j / (j! (n-j)! (nu+j)!)``, proportional to ``L_n^(nu)(m/Gamma^2)``."""
    return _eval(SeriesParams(n, (nu,), gamma_sq_total=gamma_sq), m)


def cl_series(n, nu, mu, gamma_sq, m):
    return _eval(SeriesParams(n, (nu,), mu_list=(mu,), gamma_sq_total=gamma_sq), m)


def jacobi_series(n, nu, kappa, gamma_sq, m):
    """Bare Jacobi series; proportional to ``P_n^(kappa, nu)(2m/Gamma^2 - 1)``."""
    return _eval(SeriesParams(n, (nu,), kappa_list=(kappa,), gamma_sq_total=gamma_sq), m)


# ---------------------------------------------------------------------------
# beta = 1, 4 at k = 1


def map_beta14(beta, kind, params: SeriesParams, m):
    """Map a ``beta=1,4``, ``k=1`` average onto ``beta=2`` series parameters.

    Wishart-Laguerre rescales the mass, ``m -> gamma_tilde * m``;
    Cauchy-Lorentz maps ``mu -> gamma_tilde*mu - gamma_tilde/gamma + 1`` and
    Jacobi maps ``kappa -> gamma_tilde*kappa + gamma_tilde/gamma - 1``, both
    leaving ``m`` unchanged.  Only single-factor parameters are accepted.

    Returns ``(params', m')``.
    """
    d = as_dyson(beta)
    kind = Kind(kind)
    if np.ndim(m) and np.size(m) != 1:
        raise UnsupportedMassCount("the beta=1,4 parameter maps hold for a single mass only")
    m = np.asarray(m).reshape(()).item() if np.ndim(m) else m
    if len(params.nu_list) != 1:
        raise SpecValidationError("map_beta14 applies to a single ensemble")
    if d.beta == 2:
        return params, m
    g, gt = d.gamma, d.gamma_tilde
    if kind is Kind.WISHART_LAGUERRE:
        return params, gt * m
    if kind is Kind.CAUCHY_LORENTZ:
        (mu,) = params.mu_list
        return replace(params, mu_list=(gt * mu - gt / g + 1,)), m
    (kappa,) = params.kappa_list
    return replace(params, kappa_list=(gt * kappa + gt / g - 1,)), m


def series_params_for(spec) -> SeriesParams:
    """``beta=2``-form series parameters matching an ensemble or product spec.

    The ``beta=1,4`` maps are not applied here; see :func:`reference_series`.
    """
    factors = spec.factors if isinstance(spec, ProductSpec) else (spec,)
    order = {Kind.WISHART_LAGUERRE: 0, Kind.CAUCHY_LORENTZ: 1, Kind.JACOBI: 2}
    ordered = sorted(factors, key=lambda f: order[f.kind])
    return SeriesParams(
        n=factors[0].n,
        nu_list=tuple(f.nu for f in ordered),
        mu_list=tuple(f.mu for f in ordered if f.kind is Kind.CAUCHY_LORENTZ),
        kappa_list=tuple(f.kappa for f in ordered if f.kind is Kind.JACOBI),
        gamma_sq_total=float(np.prod([f.gamma_sq for f in factors])),
    )


def reference_series(spec, masses) -> np.ndarray:
    """Analytic ``k=1`` reference curve for ``spec`` on a grid of single masses.

    ``beta=1,4`` single ensembles go through :func:`map_beta14`; products are
    only supported for ``beta=2``.
    """
    params = series_params_for(spec)
    masses = np.asarray(masses)
    if spec.beta == 2:
        return np.atleast_1d(product_series(params, masses))
    if isinstance(spec, ProductSpec) and len(spec.factors) > 1:
        raise UnsupportedBeta("product references are only available for beta=2")
    single = spec.factors[0] if isinstance(spec, ProductSpec) else spec
    out = []
    for m in np.atleast_1d(masses):
        p2, m2 = map_beta14(spec.beta, single.kind, params, m)
        out.append(product_series(p2, m2))
    return np.array(out)


def reference_leading_coefficient(spec) -> float:
    """Coefficient of ``m**n`` in :func:`reference_series` for ``spec``.

    The Monte Carlo average is monic up to the sign ``(-1)**n``, so
    ``(-1)**n / reference_leading_coefficient(spec)`` is the proportionality
    constant implied by the large-``m`` expansion.
    """
    params = series_params_for(spec)
    mass_factor = 1.0
    if spec.beta != 2:
        if isinstance(spec, ProductSpec) and len(spec.factors) > 1:
            raise UnsupportedBeta("product references are only available for beta=2")
        single = spec.factors[0] if isinstance(spec, ProductSpec) else spec
        params, mass_factor = map_beta14(spec.beta, single.kind, params, 1.0)
    logc, sign = series_log_coefficients(params)
    n = params.n
    return float(sign[n] * math.exp(logc[n]) * (-mass_factor / params.gamma_sq_total) ** n)
