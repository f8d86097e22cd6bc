r"""Monte Carlo averages of products of characteristic polynomials.

The observable is :math:`\det^{1/(\gamma\tilde\gamma)}(WW^\dagger\otimes 1_{\tilde\gamma k} - M)`
with the source :math:`M = 1_{\gamma n}\otimes\mathrm{diag}(m_1,\dots)` in which every
mass is repeated :math:`\tilde\gamma` times.  For all three Dyson indices it
reduces to :math:`\prod_i\prod_a(\lambda_i - m_a)` over the distinct Gram
eigenvalues (Kramers pairs counted once for quaternions), which is the
polynomial branch of the fractional power.

All masses of a grid are evaluated on one sample stream (common random
numbers), so their errors are correlated and the covariance is reported.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import (KRAMERS_TOL, SpectrumWithMultiplicity, as_dyson, collapse_kramers,
                      gram_batch, pair_values)
from .ensembles import AnySpec, McmcConfig, draw
from .errors import DegenerateGrid, SpecValidationError

CHUNK = 50_000


@dataclass(frozen=True)
class SourceSpec:
    """The ``k`` masses of the source; Kramers doubling is applied internally."""

    masses: tuple

    def __post_init__(self):
        masses = tuple(np.atleast_1d(np.asarray(self.masses)).tolist())
        if not masses:
            raise SpecValidationError("a source needs at least one mass")
        object.__setattr__(self, "masses", masses)

    @classmethod
    def coerce(cls, value) -> "SourceSpec":
        return value if isinstance(value, SourceSpec) else cls(value)

    @property
    def k(self) -> int:
        return len(self.masses)

    def realized(self, beta, n: int) -> np.ndarray:
        """Dense source matrix ``1_{gamma n} (x) diag(masses repeated gamma_tilde times)``."""
        d = as_dyson(beta)
        diag = np.repeat(np.asarray(self.masses, dtype=complex), d.gamma_tilde)
        return np.kron(np.eye(d.gamma * n), np.diag(diag))

    def label(self) -> str:
        return ";".join(repr(m) for m in self.masses)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    n_samples: int
    seed: int


class EstimateCurve(Sequence):
    """Estimates on a mass grid together with their covariance matrix."""

    def __init__(self, estimates, covariance, sources):
        self.estimates = list(estimates)
        self.covariance = np.asarray(covariance)
        self.sources = list(sources)

    def __getitem__(self, i):
        return self.estimates[i]

    def __len__(self):
        return len(self.estimates)

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.estimates])

    @property
    def stderrs(self) -> np.ndarray:
        return np.array([e.stderr for e in self.estimates])


def char_poly_observable(spectrum: SpectrumWithMultiplicity, src, beta):
    """Product over eigenvalues and masses of ``(lambda_i - m_a)``.

    For ``beta=4`` the spectrum is Kramers-collapsed first (the quaternion
    determinant); :class:`~rmtprod.errors.PairingFailure` propagates.
    """
    d = as_dyson(beta)
    src = SourceSpec.coerce(src)
    if d.beta == 4:
        spectrum = collapse_kramers(spectrum)
    lam = np.asarray(spectrum.values)
    masses = np.asarray(src.masses)
    out = np.prod(lam[:, None] - masses[None, :])
    return out.item()


def dense_determinant(gram, src, beta) -> complex:
    """``det(WW^† (x) 1_{gamma_tilde k} - M)`` by LU, without the fractional power."""
    d = as_dyson(beta)
    src = SourceSpec.coerce(src)
    H = gram.data if hasattr(gram, "data") else np.asarray(gram)
    n = H.shape[0] // d.gamma
    big = np.kron(H, np.eye(d.gamma_tilde * src.k)) - src.realized(d, n)
    return complex(np.linalg.det(big))


def spectra_of(data, beta) -> np.ndarray:
    """Distinct Gram eigenvalues of a stack of samples, shape ``(S, n)``."""
    lam = np.linalg.eigvalsh(gram_batch(data))
    if as_dyson(beta).beta == 4:
        lam = pair_values(lam, KRAMERS_TOL)
    return lam


def observables(spectra, sources) -> np.ndarray:
    """Observable for each sample (rows) and grid point (columns)."""
    sources = [SourceSpec.coerce(s) for s in sources]
    cplx = any(isinstance(m, complex) for s in sources for m in s.masses)
    out = np.empty((spectra.shape[0], len(sources)), dtype=complex if cplx else float)
    for j, s in enumerate(sources):
        masses = np.asarray(s.masses)
        out[:, j] = np.prod(spectra[:, :, None] - masses, axis=(1, 2))
    return out


def _shard_sizes(n_samples, shards):
    base, extra = divmod(n_samples, shards)
    return [base + (i < extra) for i in range(shards)]


def _run_shard(spec, n, seed_seq, cfg):
    rng = np.random.default_rng(seed_seq)
    if spec.uses_mcmc:
        draws = draw(spec, rng, n, cfg)
        return spectra_of(draws.data, spec.beta), draws.chain_ids
    chunks = []
    for start in range(0, n, CHUNK):
        draws = draw(spec, rng, min(CHUNK, n - start), cfg)
        chunks.append(spectra_of(draws.data, spec.beta))
    return np.concatenate(chunks), None


def sample_spectra(spec: AnySpec, n_samples: int, seed: int, shards: int = 1,
                   cfg: Optional[McmcConfig] = None, n_jobs: int = 1):
    """Draw ``n_samples`` Gram spectra split over deterministic shards.

    Shard ``i`` uses the ``i``-th child of ``SeedSequence(seed)``, so results
    depend on ``(seed, shards)`` but not on ``n_jobs``.  Returns
    ``(spectra, groups)``; ``groups`` labels MCMC chains (``None`` for
    independent samples).
    """
    if n_samples < 2:
        raise SpecValidationError("need at least two samples")
    if shards < 1:
        raise SpecValidationError("shards must be >= 1")
    children = np.random.SeedSequence(seed).spawn(shards)
    sizes = _shard_sizes(n_samples, shards)
    jobs = [(spec, n, ss, cfg) for n, ss in zip(sizes, children) if n]
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(lambda a: _run_shard(*a), jobs))
    else:
        results = [_run_shard(*a) for a in jobs]
    spectra = np.concatenate([r[0] for r in results])
    if spec.uses_mcmc:
        groups, offset = [], 0
        for _, ids in results:
            groups.append(ids + offset)
            offset += int(ids.max()) + 1
        return spectra, np.concatenate(groups)
    return spectra, None


def mean_and_covariance(obs, groups=None):
    """Sample mean of the columns of ``obs`` and the covariance of that mean.

    Independent rows give ``cov / S``.  With ``groups`` (MCMC chains) the
    chain-clustered estimator is used, which absorbs any within-chain
    autocorrelation.
    """
    obs = np.asarray(obs)
    S = obs.shape[0]
    mean = obs.mean(axis=0)
    if groups is None:
        resid = obs - mean
        cov = resid.T @ resid.conj() / (S - 1) / S
        return mean, cov
    labels, inverse = np.unique(groups, return_inverse=True)
    C = len(labels)
    if C < 2:
        raise SpecValidationError("chain-clustered errors need at least two chains")
    sums = np.zeros((C, obs.shape[1]), dtype=obs.dtype)
    np.add.at(sums, inverse, obs - mean)
    cov = C / (C - 1) * (sums.T @ sums.conj()) / S ** 2
    return mean, cov


def curve_from_spectra(spectra, groups, sources, n_samples, seed) -> EstimateCurve:
    obs = observables(spectra, sources)
    mean, cov = mean_and_covariance(obs, groups)
    err = np.sqrt(np.abs(np.diag(cov)))
    ests = []
    for v, e in zip(mean, err):
        v = complex(v) if np.iscomplexobj(mean) else float(v)
        ests.append(Estimate(v, float(e), int(n_samples), int(seed)))
    return EstimateCurve(ests, cov, sources)


def estimate_Z_curve(spec: AnySpec, src_grid, n_samples: int, seed: int, shards: int = 1,
                     cfg: Optional[McmcConfig] = None, n_jobs: int = 1) -> EstimateCurve:
    """Estimate the partition function on a grid of sources from one sample stream."""
    sources = [SourceSpec.coerce(s) for s in src_grid]
    if not sources:
        raise SpecValidationError("empty source grid")
    spec.check_mass_count(max(s.k for s in sources))
    spectra, groups = sample_spectra(spec, n_samples, seed, shards, cfg, n_jobs)
    return curve_from_spectra(spectra, groups, sources, n_samples, seed)


def estimate_Z(spec: AnySpec, src, n_samples: int, seed: int, shards: int = 1,
               cfg: Optional[McmcConfig] = None, n_jobs: int = 1) -> Estimate:
    """Monte Carlo estimate of ``Z(M)``; ``stderr = sd / sqrt(n_samples)`` for i.i.d. draws."""
    return estimate_Z_curve(spec, [src], n_samples, seed, shards, cfg, n_jobs)[0]


@dataclass(frozen=True)
class RatioTest:
    max_deviation_sigmas: float
    passed: bool
    ratios: np.ndarray
    ratio_stderr: np.ndarray
    mean_ratio: float
    threshold: float


def ratio_constancy_test(mc, analytic, threshold: float = 3.0) -> RatioTest:
    """Check that Monte Carlo values are proportional to an analytic curve.

    With ``r_i = mc_i / analytic_i`` and ``s_i = stderr_i / |analytic_i|`` the
    statistic is ``max_i |r_i - r_bar| / s_i`` where ``r_bar`` is the
    inverse-variance weighted mean.  Points with zero error dominate
    ``r_bar``; a zero-error point off ``r_bar`` yields an infinite statistic.
    """
    mc = list(mc)
    analytic = np.asarray(analytic, dtype=complex if any(
        isinstance(e.value, complex) for e in mc) else float)
    if len(mc) != len(analytic):
        raise ValueError("mc and analytic lengths differ")
    if np.any(np.abs(analytic) <= 1e-12):
        raise DegenerateGrid("analytic reference vanishes on the grid")
    values = np.array([e.value for e in mc])
    errs = np.array([e.stderr for e in mc], dtype=float)
    ratios = values / analytic
    sig = errs / np.abs(analytic)
    exact = sig == 0
    if exact.any():
        r_bar = ratios[exact].mean()
    else:
        w = 1.0 / sig ** 2
        r_bar = np.sum(w * ratios) / np.sum(w)
    dev = np.abs(ratios - r_bar)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(exact, np.where(dev <= 1e-14 * np.abs(r_bar), 0.0, np.inf), dev / np.where(exact, 1.0, sig))
    stat = float(np.max(z))
    return RatioTest(stat, bool(stat <= threshold), ratios, sig, complex(r_bar) if np.iscomplexobj(r_bar) else float(r_bar), threshold)
