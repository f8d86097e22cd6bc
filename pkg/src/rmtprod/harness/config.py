"""Experiment configuration: JSON document, schema validation, CLI overrides."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import jsonschema

from ..ensembles import AnySpec, Kind, spec_from_dict
from ..errors import SpecValidationError
from ..mcmc import McmcConfig

EXPERIMENTS = ("sample", "estimate", "analytic", "compare", "hard-edge", "quadrature")
NEEDS_ENSEMBLE = ("sample", "estimate", "analytic", "compare")
NEEDS_MASSES = ("estimate", "analytic", "compare")
DEFAULT_TOLERANCES = {"sigma": 3.0, "relative": 1e-10, "cbe2": 1e-8, "hard_edge": 1e-2}
DEFAULT_SAMPLES = 10_000


def load_schema() -> dict:
    text = resources.files("rmtprod.harness").joinpath("config.schema.json").read_text()
    return json.loads(text)


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment.  ``document`` is the effective JSON (overrides applied)."""

    experiment: str
    seed: int
    document: dict = field(repr=False)
    ensemble: Optional[AnySpec] = None
    reference: Optional[AnySpec] = None
    masses: tuple = ()
    samples: int = DEFAULT_SAMPLES
    shards: int = 1
    n_jobs: int = 1
    mcmc: Optional[McmcConfig] = None
    output: Optional[str] = None
    format: str = "csv"
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    hard_edge: Optional[dict] = None
    quadrature: Optional[dict] = None

    @classmethod
    def from_dict(cls, doc: dict, experiment: Optional[str] = None) -> "ExperimentConfig":
        """Validate ``doc`` against the schema and the semantic preconditions.

        ``experiment`` (the CLI subcommand) must agree with ``doc["experiment"]``
        when both are given.
        """
        doc = json.loads(json.dumps(doc))
        if experiment is not None:
            if doc.get("experiment", experiment) != experiment:
                raise SpecValidationError(
                    f"config is for {doc['experiment']!r}, not {experiment!r}")
            doc["experiment"] = experiment
        try:
            jsonschema.validate(doc, load_schema())
        except jsonschema.ValidationError as exc:
            raise SpecValidationError(f"config: {exc.message}") from None
        kind = doc.get("experiment")
        if kind is None:
            raise SpecValidationError("config names no experiment")
        if kind in NEEDS_ENSEMBLE and "ensemble" not in doc:
            raise SpecValidationError(f"{kind} needs an ensemble")
        if kind in NEEDS_MASSES and "masses" not in doc:
            raise SpecValidationError(f"{kind} needs masses")
        if kind == "hard-edge" and "hard_edge" not in doc:
            raise SpecValidationError("hard-edge needs a hard_edge block")
        if kind == "quadrature" and "quadrature" not in doc:
            raise SpecValidationError("quadrature needs a quadrature block")

        masses = tuple(tuple(float(x) for x in (m if isinstance(m, list) else [m]))
                       for m in doc.get("masses", ()))
        tolerances = dict(DEFAULT_TOLERANCES, **doc.get("tolerances", {}))
        cfg = cls(
            experiment=kind,
            seed=int(doc["seed"]),
            document=doc,
            ensemble=spec_from_dict(doc["ensemble"]) if "ensemble" in doc else None,
            reference=spec_from_dict(doc["reference"]) if "reference" in doc else None,
            masses=masses,
            samples=int(doc.get("samples", DEFAULT_SAMPLES)),
            shards=int(doc.get("shards", 1)),
            n_jobs=int(doc.get("n_jobs", 1)),
            mcmc=McmcConfig(**doc["mcmc"]) if "mcmc" in doc else None,
            output=doc.get("output"),
            format=doc.get("format", "csv"),
            tolerances=tolerances,
            hard_edge=doc.get("hard_edge"),
            quadrature=doc.get("quadrature"),
        )
        cfg._check_semantics()
        return cfg

    def _check_semantics(self):
        if self.ensemble is not None and self.masses:
            self.ensemble.check_mass_count(max(len(m) for m in self.masses))
        if self.experiment in ("analytic", "compare") and any(len(m) != 1 for m in self.masses):
            raise SpecValidationError("analytic references cover one mass per grid point")
        if self.hard_edge is not None:
            n_list = self.hard_edge["n_list"]
            if n_list != sorted(n_list):
                raise SpecValidationError("hard_edge.n_list must be ascending")
        q = self.quadrature
        if q is not None:
            kinds = [Kind(k) for k in q["kinds"]]
            if any(k is not Kind.WISHART_LAGUERRE for k in kinds) and not q.get("gamma_scale", 1.0) > 1:
                raise SpecValidationError("CauchyLorentz/Jacobi quadrature requires gamma_scale > 1")
            if Kind.CAUCHY_LORENTZ in kinds and "mu" not in q:
                raise SpecValidationError("CauchyLorentz quadrature needs mu")
            if Kind.JACOBI in kinds and "kappa" not in q:
                raise SpecValidationError("Jacobi quadrature needs kappa")
            if any(k is not Kind.WISHART_LAGUERRE for k in kinds) and len(q.get("masses", ())) < 2:
                raise SpecValidationError("ratio constancy needs at least two masses")

    @classmethod
    def load(cls, path, experiment: Optional[str] = None) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SpecValidationError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(doc, experiment)

    def with_overrides(self, seed=None, samples=None, output=None, format=None) -> "ExperimentConfig":
        doc = dict(self.document)
        for key, value in (("seed", seed), ("samples", samples), ("output", output), ("format", format)):
            if value is not None:
                doc[key] = value
        return type(self).from_dict(doc, self.experiment)

    def sha256(self) -> str:
        """Hash of the effective configuration, excluding where the output goes."""
        doc = {k: v for k, v in self.document.items() if k not in ("output", "format")}
        return hashlib.sha256(canonical_json(doc).encode()).hexdigest()

