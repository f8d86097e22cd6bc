"""Experiment runners: each takes an :class:`ExperimentConfig` and returns a :class:`Report`."""
from __future__ import annotations

import math

import numpy as np

from ..analytic.contour import QuadratureConfig, cbe2_quadrature, contour_quadrature_k1
from ..analytic.hard_edge import hard_edge_scan
from ..analytic.polynomials import christoffel_darboux_laguerre
from ..analytic.series import (SeriesParams, product_series, reference_leading_coefficient,
                               reference_series)
from ..charpoly import SourceSpec, estimate_Z_curve, ratio_constancy_test, sample_spectra
from ..ensembles import Kind
from ..errors import SpecValidationError
from .config import ExperimentConfig
from .report import ESTIMATE_COLUMNS, Report, Verdict, provenance

COMPARE_COLUMNS = ESTIMATE_COLUMNS + ("analytic", "ratio", "deviation_sigmas")


def _mass_cell(masses):
    return masses[0] if len(masses) == 1 else tuple(masses)


def _finite_verdict(name, values):
    bad = int(np.sum(~np.isfinite(np.asarray(values, dtype=complex))))
    return Verdict(name, bad == 0, float(bad), 0.0)


def _curve(cfg: ExperimentConfig):
    sources = [SourceSpec(m) for m in cfg.masses]
    return sources, estimate_Z_curve(cfg.ensemble, sources, cfg.samples, cfg.seed, cfg.shards,
                                     cfg.mcmc, cfg.n_jobs)


def run_sample(cfg: ExperimentConfig) -> Report:
    """Gram spectra of ``samples`` draws, one row per eigenvalue."""
    spectra, groups = sample_spectra(cfg.ensemble, cfg.samples, cfg.seed, cfg.shards, cfg.mcmc,
                                     cfg.n_jobs)
    records = [{"sample": i, "index": j, "eigenvalue": float(v)}
               for i, row in enumerate(spectra) for j, v in enumerate(row)]
    verdicts = [_finite_verdict("finite_spectra", spectra)]
    return Report("sample", ("sample", "index", "eigenvalue"), records, verdicts, provenance(cfg))


def run_estimate(cfg: ExperimentConfig) -> Report:
    sources, curve = _curve(cfg)
    records = [{"mass": _mass_cell(s.masses), "value": e.value, "stderr": e.stderr,
                "n_samples": e.n_samples, "seed": e.seed} for s, e in zip(sources, curve)]
    verdicts = [_finite_verdict("finite_estimates", curve.values)]
    return Report("estimate", ESTIMATE_COLUMNS, records, verdicts, provenance(cfg))


def run_analytic(cfg: ExperimentConfig) -> Report:
    masses = np.array([m[0] for m in cfg.masses])
    values = reference_series(cfg.ensemble, masses)
    records = [{"mass": float(m), "value": v.item()} for m, v in zip(masses, values)]
    verdicts = [_finite_verdict("finite_series", values)]
    return Report("analytic", ("mass", "value"), records, verdicts, provenance(cfg))


def run_compare(cfg: ExperimentConfig) -> Report:
    """Monte Carlo curve against the closed-form series, by ratio constancy.

    ``reference`` in the config replaces the ensemble on the analytic side
    (used for planted-mismatch controls).
    """
    reference = cfg.reference or cfg.ensemble
    sources, curve = _curve(cfg)
    analytic = reference_series(reference, [s.masses[0] for s in sources])
    test = ratio_constancy_test(curve, analytic, threshold=cfg.tolerances["sigma"])
    records = []
    for s, e, a, r, sig in zip(sources, curve, analytic, test.ratios, test.ratio_stderr):
        dev = abs(r - test.mean_ratio) / sig if sig > 0 else 0.0
        records.append({"mass": s.masses[0], "value": e.value, "stderr": e.stderr,
                        "n_samples": e.n_samples, "seed": e.seed, "analytic": a.item(),
                        "ratio": r.item(), "deviation_sigmas": float(dev)})
    n = reference.n
    details = {"mean_ratio": test.mean_ratio,
               "leading_order_ratio": (-1) ** n / reference_leading_coefficient(reference)}
    verdicts = [Verdict("ratio_constancy", test.passed, test.max_deviation_sigmas, test.threshold,
                        details)]
    return Report("compare", COMPARE_COLUMNS, records, verdicts, provenance(cfg))


def _x_grid(spec):
    if isinstance(spec, dict):
        return np.linspace(spec.get("start", 0.0), spec["stop"], spec["num"])
    return np.asarray(spec, dtype=float)


def run_hard_edge(cfg: ExperimentConfig) -> Report:
    """Hard-edge convergence scan; monotonicity is skipped for a single ``n``."""
    he = cfg.hard_edge
    scan = hard_edge_scan(he["nu_list"], he["n_list"], _x_grid(he["x_grid"]),
                          he.get("mu_hat", ()), he.get("kappa_hat", ()), he.get("gamma_sq", 1.0))
    records = [{"n": n, "x": float(x), "finite_n": float(v), "limit": float(l)}
               for n, row in zip(scan.n_list, scan.finite_n)
               for x, v, l in zip(scan.x_grid, row, scan.limit)]
    d = scan.distances
    verdicts = []
    distances = {str(n): float(v) for n, v in zip(scan.n_list, d)}
    if len(d) > 1:
        worst_step = float(np.max(np.diff(d)))
        verdicts.append(Verdict("monotone_decrease", scan.strictly_decreasing, worst_step, 0.0,
                                {"distances": distances}))
    tol = cfg.tolerances["hard_edge"]
    verdicts.append(Verdict("final_distance", scan.final_distance < tol, scan.final_distance, tol,
                            {"distances": distances, "monotonicity_checked": len(d) > 1}))
    return Report("hard-edge", ("n", "x", "finite_n", "limit"), records, verdicts, provenance(cfg))


def _single_params(kind, n, q):
    return SeriesParams(
        n=n, nu_list=(q.get("nu", 0),),
        mu_list=(q["mu"],) if kind is Kind.CAUCHY_LORENTZ else (),
        kappa_list=(q["kappa"],) if kind is Kind.JACOBI else (),
        gamma_sq_total=q.get("gamma_scale", 1.0) ** 2,
    )


def _spread(ratios):
    ratios = np.asarray(ratios)
    return float(np.max(np.abs(ratios / ratios[0] - 1)))


def run_quadrature_identity(cfg: ExperimentConfig) -> Report:
    """Contour quadrature against the series, and the ``k=2`` quadrature against Christoffel-Darboux.

    Wishart-Laguerre checks the exact identity ``contour = n! Gamma^(-2 nu) series``;
    the other kinds check that ``contour / series`` is constant on the mass grid.
    """
    q = cfg.quadrature
    qcfg = QuadratureConfig(q.get("nodes", 256), q.get("radius"))
    rel = cfg.tolerances["relative"]
    masses = q.get("masses", [0.5, 1.0, 2.0, 4.0])
    columns = ("identity", "kind", "n", "mass", "quadrature", "quadrature_imag", "reference", "ratio")
    records, verdicts = [], []
    for kind_name in q["kinds"]:
        kind = Kind(kind_name)
        for n in q["n_list"]:
            p = _single_params(kind, n, q)
            ratios = []
            for m in masses:
                c = contour_quadrature_k1(kind, p, m, qcfg)
                s = product_series(p, m)
                if kind is Kind.WISHART_LAGUERRE:
                    s = math.factorial(n) * p.gamma_sq_total ** (-p.nu_list[0]) * s
                ratio = c.real / s if s != 0 else math.nan
                ratios.append(ratio)
                records.append({"identity": "contour", "kind": kind.value, "n": n, "mass": float(m),
                                "quadrature": c.real, "quadrature_imag": c.imag, "reference": s,
                                "ratio": ratio})
            if kind is Kind.WISHART_LAGUERRE:
                stat = float(np.max(np.abs(np.asarray(ratios) - 1)))
            else:
                stat = _spread(ratios)
            verdicts.append(Verdict(f"contour_{kind.value}_n{n}", bool(stat <= rel), stat, rel))

    pairs = q.get("pairs", [])
    if pairs:
        n2 = q.get("pair_n", 2)
        nu, g2 = q.get("nu", 0), q.get("gamma_scale", 1.0) ** 2
        p = SeriesParams(n2, (nu,), gamma_sq_total=g2)
        ratios = []
        for m1, m2 in pairs:
            c = cbe2_quadrature(2, Kind.WISHART_LAGUERRE, p, (m1, m2), qcfg)
            oracle = christoffel_darboux_laguerre(n2, nu, g2, m1, m2)
            ratios.append(c.real / oracle)
            records.append({"identity": "cbe2", "kind": Kind.WISHART_LAGUERRE.value, "n": n2,
                            "mass": (float(m1), float(m2)), "quadrature": c.real,
                            "quadrature_imag": c.imag, "reference": oracle, "ratio": c.real / oracle})
        tol = cfg.tolerances["cbe2"]
        stat = _spread(ratios)
        verdicts.append(Verdict("cbe2_christoffel_darboux", bool(stat <= tol), stat, tol))
    return Report("quadrature", columns, records, verdicts, provenance(cfg))


RUNNERS = {
    "sample": run_sample,
    "estimate": run_estimate,
    "analytic": run_analytic,
    "compare": run_compare,
    "hard-edge": run_hard_edge,
    "quadrature": run_quadrature_identity,
}


def run(cfg: ExperimentConfig) -> Report:
    try:
        runner = RUNNERS[cfg.experiment]
    except KeyError:
        raise SpecValidationError(f"unknown experiment {cfg.experiment!r}") from None
    return runner(cfg)
