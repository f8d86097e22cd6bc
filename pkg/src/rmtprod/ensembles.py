r"""Samplers for the Wishart-Laguerre, Cauchy-Lorentz and Jacobi ensembles.

Every ensemble is parametrised by an :class:`EnsembleSpec`.  A sample is the
rectangular ``n x (n+nu)`` matrix :math:`W'`; its Gram matrix then carries
the induced factor :math:`\det^{\nu/\tilde\gamma} W'W'^\dagger`.

==================  =====================================================  ==========================
kind                Gram density (square-matrix measure)                    construction
==================  =====================================================  ==========================
WishartLaguerre     det^{nu/gt}(G) exp(-tr G / Gamma^2)                      Gaussian entries
CauchyLorentz       det^{nu/gt}(G) det^{-mu}(Gamma^2 + G)                    random-walk Metropolis
Jacobi              det^{nu/gt}(G) det^{kappa}(Gamma^2 - G) Theta(...)       Haar truncation, else MCMC
==================  =====================================================  ==========================

Per-entry variances of the Gaussian ensemble follow from the density: each
real component has variance ``Gamma**2 / (2*gamma)``, i.e. ``Gamma**2/2`` for
real entries, ``E|w|^2 = Gamma**2`` for complex and quaternion entries.

Jacobi truncation: the top-left ``n x (n+nu)`` block of a Haar matrix from
``U^(beta)(N)`` has Gram density with exponent
``gamma*kappa = beta/2 * (N - 2n - nu + 1) - 1``, hence

    N = 2 (gamma*kappa + 1) / beta + 2n + nu - 1,

which is ``2n + nu + kappa`` for ``beta=2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .algebra import (FieldMatrix, as_dyson, gaussian_field, gram_batch, haar_columns,
                      polar_square)
from .errors import DimensionMismatch, SpecValidationError, UnrealizableParameters
from .mcmc import McmcConfig, coords_to_data, metropolis, n_coordinates

__all__ = [
    "Kind", "EnsembleSpec", "ProductSpec", "McmcConfig", "Draws",
    "jacobi_truncation_size", "draw", "sample_wishart_laguerre", "sample_jacobi",
    "sample_cauchy_lorentz", "sample_product", "spec_from_dict",
]


class Kind(str, Enum):
    WISHART_LAGUERRE = "WishartLaguerre"
    CAUCHY_LORENTZ = "CauchyLorentz"
    JACOBI = "Jacobi"


def _is_int(x, tol=1e-12):
    return abs(x - round(x)) <= tol


@dataclass(frozen=True)
class EnsembleSpec:
    kind: Kind
    beta: int
    n: int
    nu: int = 0
    gamma_scale: float = 1.0
    mu: Optional[float] = None
    kappa: Optional[float] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", Kind(self.kind))
        except ValueError:
            raise SpecValidationError(f"unknown ensemble kind {self.kind!r}") from None
        object.__setattr__(self, "beta", as_dyson(self.beta).beta)
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise SpecValidationError(f"n must be a positive integer, got {self.n!r}")
        if not (isinstance(self.nu, (int, np.integer)) and self.nu >= 0):
            raise SpecValidationError(f"nu must be a non-negative integer, got {self.nu!r}")
        if not self.gamma_scale > 0:
            raise SpecValidationError("gamma_scale must be positive")
        if self.kind is Kind.CAUCHY_LORENTZ:
            if self.mu is None:
                raise SpecValidationError("CauchyLorentz needs mu")
            self.check_mass_count(0)
        elif self.mu is not None:
            raise SpecValidationError("mu only applies to CauchyLorentz")
        if self.kind is Kind.JACOBI:
            if self.kappa is None:
                raise SpecValidationError("Jacobi needs kappa")
            if not self.kappa > -1.0 / (2 * self.dyson.gamma):
                raise SpecValidationError(
                    f"kappa must exceed -1/(2 gamma) = {-1.0 / (2 * self.dyson.gamma)}, got {self.kappa}")
        elif self.kappa is not None:
            raise SpecValidationError("kappa only applies to Jacobi")

    @property
    def dyson(self):
        return as_dyson(self.beta)

    @property
    def gamma_sq(self) -> float:
        return self.gamma_scale ** 2

    def mu_bound(self, k: int) -> float:
        """Lower bound on ``mu`` for the average of ``k`` characteristic polynomials."""
        d = self.dyson
        return k / d.gamma + (2 * self.n + self.nu) / d.gamma_tilde - (d.gamma * d.gamma_tilde - 1) / 2

    def check_mass_count(self, k: int) -> None:
        if self.kind is Kind.CAUCHY_LORENTZ and not self.mu > self.mu_bound(k):
            raise SpecValidationError(
                f"CauchyLorentz with k={k} masses needs mu > {self.mu_bound(k)}, got {self.mu}")

    @property
    def truncation_size(self) -> Optional[int]:
        if self.kind is not Kind.JACOBI:
            return None
        return jacobi_truncation_size(self.beta, self.n, self.nu, self.kappa)

    @property
    def uses_mcmc(self) -> bool:
        return self.kind is Kind.CAUCHY_LORENTZ or (
            self.kind is Kind.JACOBI and self.truncation_size is None)

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "beta": self.beta, "n": self.n, "nu": self.nu,
               "gamma_scale": self.gamma_scale}
        if self.mu is not None:
            out["mu"] = self.mu
        if self.kappa is not None:
            out["kappa"] = self.kappa
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        return cls(kind=d["kind"], beta=d["beta"], n=d["n"], nu=d.get("nu", 0),
                   gamma_scale=d.get("gamma_scale", 1.0), mu=d.get("mu"), kappa=d.get("kappa"))


@dataclass(frozen=True)
class ProductSpec:
    """Ordered factors of ``W = W_1 W_2 ... W_L``; all share ``beta`` and ``n``."""

    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise SpecValidationError("a product needs at least one factor")
        for f in factors:
            if not isinstance(f, EnsembleSpec):
                raise SpecValidationError("product factors must be EnsembleSpec instances")
        if len({(f.beta, f.n) for f in factors}) != 1:
            raise DimensionMismatch("all product factors must share beta and n")
        object.__setattr__(self, "factors", factors)

    @property
    def beta(self) -> int:
        return self.factors[0].beta

    @property
    def n(self) -> int:
        return self.factors[0].n

    @property
    def dyson(self):
        return as_dyson(self.beta)

    @property
    def uses_mcmc(self) -> bool:
        return any(f.uses_mcmc for f in self.factors)

    def check_mass_count(self, k: int) -> None:
        for f in self.factors:
            f.check_mass_count(k)

    def reversed(self) -> "ProductSpec":
        return ProductSpec(self.factors[::-1])

    def to_dict(self) -> dict:
        return {"factors": [f.to_dict() for f in self.factors]}

    @classmethod
    def from_dict(cls, d: dict) -> "ProductSpec":
        return cls(tuple(EnsembleSpec.from_dict(f) for f in d["factors"]))


AnySpec = Union[EnsembleSpec, ProductSpec]


def spec_from_dict(d: dict) -> AnySpec:
    if "factors" in d:
        return ProductSpec.from_dict(d)
    return EnsembleSpec.from_dict(d)


def jacobi_truncation_size(beta, n: int, nu: int, kappa: float) -> Optional[int]:
    """Haar dimension whose truncation realises the Jacobi exponent, or None."""
    d = as_dyson(beta)
    size = 2 * (d.gamma * kappa + 1) / d.beta + 2 * n + nu - 1
    if not _is_int(size):
        return None
    size = int(round(size))
    return size if size >= 2 * n + nu else None


# ---------------------------------------------------------------------------
# batched drawing


@dataclass
class Draws:
    """A stack of samples; ``chain_ids`` groups MCMC states by chain."""

    data: np.ndarray
    chain_ids: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.data)


def _draw_wishart(spec, rng, size):
    return gaussian_field(spec.beta, spec.n, spec.n + spec.nu, rng, scale=spec.gamma_scale, size=size)


def _draw_truncation(spec, rng, size, N):
    d = spec.dyson
    p = spec.n + spec.nu
    cols = haar_columns(d, N, p, rng, size=size)
    if d.beta == 4:
        rows = np.r_[0:spec.n, N:N + spec.n]
    else:
        rows = np.arange(spec.n)
    return spec.gamma_scale * cols[..., rows, :]


def _log_density(spec):
    d = spec.dyson
    rows, cols = spec.n, spec.n + spec.nu
    eye = np.eye(d.gamma * rows)
    g2 = spec.gamma_sq

    if spec.kind is Kind.CAUCHY_LORENTZ:
        def log_density(x):
            gram = gram_batch(coords_to_data(x, d, rows, cols))
            _, logdet = np.linalg.slogdet(g2 * eye + gram)
            return -spec.mu * logdet
    elif spec.kind is Kind.JACOBI:
        def log_density(x):
            gram = gram_batch(coords_to_data(x, d, rows, cols))
            lam = np.linalg.eigvalsh(g2 * eye - gram)
            inside = lam.min(axis=-1) > 0
            with np.errstate(divide="ignore", invalid="ignore"):
                out = spec.kappa * np.log(np.where(inside[:, None], lam, 1.0)).sum(axis=-1)
            return np.where(inside, out, -np.inf)
    else:
        def log_density(x):
            gram = gram_batch(coords_to_data(x, d, rows, cols))
            return -np.trace(gram, axis1=-2, axis2=-1).real / g2
    return log_density


def _draw_mcmc(spec, rng, size, cfg):
    cfg = cfg or McmcConfig()
    n_chains = min(cfg.n_chains, size)
    per_chain = math.ceil(size / n_chains)
    dim = n_coordinates(spec.beta, spec.n, spec.n + spec.nu)
    result = metropolis(_log_density(spec), np.zeros((n_chains, dim)), per_chain, cfg, rng,
                        scale=spec.gamma_scale)
    coords = result.samples.reshape(n_chains * per_chain, dim)[:size]
    chain_ids = np.repeat(np.arange(n_chains), per_chain)[:size]
    data = coords_to_data(coords, spec.beta, spec.n, spec.n + spec.nu)
    return Draws(np.asarray(data), chain_ids)


def draw(spec: AnySpec, rng: np.random.Generator, size: int, cfg: Optional[McmcConfig] = None,
         allow_mcmc: bool = True) -> Draws:
    """Draw ``size`` samples of a single ensemble or of a product.

    Direct constructions give independent samples; Cauchy-Lorentz (and
    Jacobi parameters without an integer truncation) come from Metropolis
    chains, in which case ``chain_ids`` records the chain of each sample.
    """
    if isinstance(spec, ProductSpec):
        return _draw_product(spec, rng, size, cfg)
    if spec.kind is Kind.WISHART_LAGUERRE:
        return Draws(_draw_wishart(spec, rng, size))
    if spec.kind is Kind.JACOBI:
        N = spec.truncation_size
        if N is not None:
            return Draws(_draw_truncation(spec, rng, size, N))
        if not allow_mcmc:
            raise UnrealizableParameters(
                f"kappa={spec.kappa} has no integer truncation for beta={spec.beta}, n={spec.n}, nu={spec.nu}")
    return _draw_mcmc(spec, rng, size, cfg)


FactorSampler = Callable[[EnsembleSpec, np.random.Generator, int], np.ndarray]


def _square_factor(spec, rng, size, cfg, factor_sampler):
    if factor_sampler is not None:
        return Draws(np.asarray(factor_sampler(spec, rng, size)))
    draws = draw(spec, rng, size, cfg)
    if spec.nu:
        draws.data = polar_square(draws.data, spec.beta, rng)
    return draws


def _draw_product(pspec, rng, size, cfg, factor_sampler=None):
    parts = [_square_factor(f, rng, size, cfg, factor_sampler) for f in pspec.factors]
    product = reduce(np.matmul, [p.data for p in parts])
    chain_ids = next((p.chain_ids for p in parts if p.chain_ids is not None), None)
    return Draws(product, chain_ids)


# ---------------------------------------------------------------------------
# single-sample API


def sample_wishart_laguerre(spec: EnsembleSpec, rng: np.random.Generator) -> FieldMatrix:
    """One ``n x (n+nu)`` Gaussian matrix with density ``exp(-tr W W^† / Gamma^2)``."""
    if spec.kind is not Kind.WISHART_LAGUERRE:
        raise SpecValidationError("spec is not WishartLaguerre")
    return FieldMatrix.from_beta(spec.beta, _draw_wishart(spec, rng, None))


def sample_jacobi(spec: EnsembleSpec, rng: np.random.Generator, cfg: Optional[McmcConfig] = None,
                  allow_mcmc: bool = True) -> FieldMatrix:
    """One Jacobi sample: a scaled Haar truncation when possible, else MCMC.

    Raises :class:`UnrealizableParameters` if no integer truncation exists and
    ``allow_mcmc`` is false.
    """
    if spec.kind is not Kind.JACOBI:
        raise SpecValidationError("spec is not Jacobi")
    draws = draw(spec, rng, 1, cfg, allow_mcmc=allow_mcmc)
    return FieldMatrix.from_beta(spec.beta, draws.data[0])


def sample_cauchy_lorentz(spec: EnsembleSpec, rng: Optional[np.random.Generator] = None,
                          cfg: Optional[McmcConfig] = None) -> FieldMatrix:
    """Final state of a single Metropolis chain targeting the Cauchy-Lorentz density.

    Without ``rng`` the chain is seeded from ``cfg.chain_seed``.
    """
    if spec.kind is not Kind.CAUCHY_LORENTZ:
        raise SpecValidationError("spec is not CauchyLorentz")
    cfg = cfg or McmcConfig()
    if rng is None:
        rng = np.random.default_rng(cfg.chain_seed)
    dim = n_coordinates(spec.beta, spec.n, spec.n + spec.nu)
    result = metropolis(_log_density(spec), np.zeros((1, dim)), 1, cfg, rng, scale=spec.gamma_scale)
    data = coords_to_data(result.samples[0, -1], spec.beta, spec.n, spec.n + spec.nu)
    return FieldMatrix.from_beta(spec.beta, data)


def sample_product(pspec: ProductSpec, rng: np.random.Generator, cfg: Optional[McmcConfig] = None,
                   factor_sampler: Optional[FactorSampler] = None):
    """Draw each factor independently and multiply them left to right.

    Factors with ``nu > 0`` are reduced to ``n x n`` matrices with the same
    Gram matrix and a Haar right factor, which realises the induced measure
    on square matrices.  ``factor_sampler(spec, rng, size)`` replaces the
    built-in samplers (a hook for deterministic stubs in tests).

    Returns ``(factors, product)`` as :class:`FieldMatrix` objects.
    """
    if not isinstance(pspec, ProductSpec):
        raise SpecValidationError("sample_product needs a ProductSpec")
    parts = [_square_factor(f, rng, 1, cfg, factor_sampler) for f in pspec.factors]
    mats = [p.data[0] for p in parts]
    for left, right in zip(mats, mats[1:]):
        if left.shape[1] != right.shape[0]:
            raise DimensionMismatch(f"cannot multiply {left.shape} by {right.shape}")
    product = reduce(np.matmul, mats)
    field_factors = [FieldMatrix.from_beta(pspec.beta, m) for m in mats]
    return field_factors, FieldMatrix.from_beta(pspec.beta, product)
