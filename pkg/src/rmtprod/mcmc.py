"""Random-walk Metropolis on the real coordinates of field-valued matrices.

Chains are advanced in lock step as one vectorised array so that a few
hundred of them cost little more than one.  The proposal scale is adapted
during burn-in only and frozen afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import as_dyson, quaternion_embed
from .errors import ChainDiverged, SpecValidationError


@dataclass(frozen=True)
class McmcConfig:
    step_scale: float = 0.5
    burn_in: int = 10_000
    thinning: int = 10
    chain_seed: int = 0
    n_chains: int = 64
    target_acceptance: float = 0.3
    adapt_every: int = 100

    def __post_init__(self):
        if not self.step_scale > 0:
            raise SpecValidationError("step_scale must be positive")
        if self.burn_in < 0:
            raise SpecValidationError("burn_in must be non-negative")
        if self.thinning < 1:
            raise SpecValidationError("thinning must be >= 1")
        if self.n_chains < 1:
            raise SpecValidationError("n_chains must be >= 1")
        if not 0 < self.target_acceptance < 1:
            raise SpecValidationError("target_acceptance must lie in (0, 1)")

    def to_dict(self) -> dict:
        return dict(step_scale=self.step_scale, burn_in=self.burn_in, thinning=self.thinning,
                    chain_seed=self.chain_seed, n_chains=self.n_chains,
                    target_acceptance=self.target_acceptance, adapt_every=self.adapt_every)


@dataclass
class ChainResult:
    samples: np.ndarray  # (n_chains, n_keep, dim)
    acceptance: float
    step: float


def n_coordinates(beta, rows: int, cols: int) -> int:
    return as_dyson(beta).beta * rows * cols


def coords_to_data(x, beta, rows: int, cols: int) -> np.ndarray:
    """Map real coordinates ``(..., beta*rows*cols)`` onto matrix storage.

    The map is linear with constant Jacobian, so a flat density in the
    coordinates is a flat density in the matrix entries.
    """
    d = as_dyson(beta)
    lead = x.shape[:-1]
    parts = x.reshape(lead + (d.beta, rows, cols))
    if d.beta == 1:
        return parts[..., 0, :, :]
    if d.beta == 2:
        return parts[..., 0, :, :] + 1j * parts[..., 1, :, :]
    a = parts[..., 0, :, :] + 1j * parts[..., 1, :, :]
    b = parts[..., 2, :, :] + 1j * parts[..., 3, :, :]
    return quaternion_embed(a, b)


def metropolis(log_density, x0, n_keep: int, cfg: McmcConfig, rng: np.random.Generator,
               scale: float = 1.0) -> ChainResult:
    """Run ``len(x0)`` chains and keep ``n_keep`` thinned states from each.

    ``log_density`` maps an array of coordinates ``(C, D)`` to ``(C,)`` log
    densities, up to a constant.  ``-inf`` marks points outside the support
    (always rejected); ``nan`` or ``+inf`` raises :class:`ChainDiverged`.
    """
    x = np.array(x0, dtype=float)
    n_chains, dim = x.shape
    lp = np.asarray(log_density(x), dtype=float)
    if not np.all(np.isfinite(lp)):
        raise ChainDiverged("initial state has a non-finite log density")
    step = cfg.step_scale * scale

    def advance(x, lp, step):
        prop = x + step * rng.standard_normal((n_chains, dim))
        lp_prop = np.asarray(log_density(prop), dtype=float)
        if np.any(np.isnan(lp_prop)) or np.any(lp_prop == np.inf):
            raise ChainDiverged("log density evaluated to nan/+inf along the chain")
        accept = np.log(rng.random(n_chains)) < lp_prop - lp
        x = np.where(accept[:, None], prop, x)
        lp = np.where(accept, lp_prop, lp)
        return x, lp, int(accept.sum())

    accepted = 0
    for i in range(cfg.burn_in):
        x, lp, acc = advance(x, lp, step)
        accepted += acc
        if (i + 1) % cfg.adapt_every == 0:
            rate = accepted / (cfg.adapt_every * n_chains)
            step *= np.exp(2.0 * (rate - cfg.target_acceptance))
            accepted = 0

    kept = np.empty((n_chains, n_keep, dim))
    accepted = 0
    for i in range(n_keep):
        for _ in range(cfg.thinning):
            x, lp, acc = advance(x, lp, step)
            accepted += acc
        kept[:, i] = x
    total = n_keep * cfg.thinning * n_chains
    return ChainResult(kept, accepted / total if total else float("nan"), float(step))
