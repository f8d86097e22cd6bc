"""Reports: per-point records, verdicts and provenance, with CSV/JSON writers.

CSV holds the records only, one row per point, floats written with
``repr`` so that :func:`parse_csv` restores them bit for bit.  Multi-mass
points are written as ``m1;m2;...``.  Verdicts and provenance live in JSON.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from .config import ExperimentConfig

ESTIMATE_COLUMNS = ("mass", "value", "stderr", "n_samples", "seed")


@dataclass
class Verdict:
    name: str
    passed: bool
    statistic: float
    threshold: float
    details: dict = field(default_factory=dict)


@dataclass
class Report:
    experiment: str
    columns: tuple
    records: list
    verdicts: list
    provenance: dict

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_csv(self) -> str:
        return records_to_csv(self.columns, self.records)

    def to_json_dict(self, include_records: bool = True) -> dict:
        out = {
            "experiment": self.experiment,
            "passed": self.passed,
            "verdicts": [_jsonable(asdict(v)) for v in self.verdicts],
            "provenance": self.provenance,
        }
        if include_records:
            out["columns"] = list(self.columns)
            out["records"] = [{c: _cell_json(r[c]) for c in self.columns} for r in self.records]
        return out

    def to_json(self, include_records: bool = True) -> str:
        return json.dumps(self.to_json_dict(include_records), indent=2, sort_keys=True) + "\n"

    def summary_lines(self):
        for v in self.verdicts:
            yield f"{'PASS' if v.passed else 'FAIL'} {v.name}: statistic={v.statistic!r} threshold={v.threshold!r}"


def provenance(cfg: ExperimentConfig) -> dict:
    return {
        "config_sha256": cfg.sha256(),
        "version": __version__,
        "seed": cfg.seed,
        "experiment": cfg.experiment,
        "numpy": np.__version__,
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"real": float(obj.real), "imag": float(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else repr(f)
    return obj


def _cell_json(value):
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return _jsonable(value)


def format_cell(value) -> str:
    if isinstance(value, tuple):
        return ";".join(format_cell(v) for v in value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return repr(complex(value))
    return str(value)


def parse_cell(text: str):
    """Inverse of :func:`format_cell` for numbers, booleans and mass tuples."""
    if ";" in text:
        return tuple(parse_cell(t) for t in text.split(";"))
    if text in ("true", "false"):
        return text == "true"
    for conv in (int, float, complex):
        try:
            return conv(text)
        except ValueError:
            continue
    return text


def records_to_csv(columns, records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in records:
        writer.writerow([format_cell(r[c]) for c in columns])
    return buf.getvalue()


def parse_csv(text: str):
    """``(columns, records)`` from CSV produced by :func:`records_to_csv`."""
    rows = list(csv.reader(io.StringIO(text)))
    columns = tuple(rows[0])
    return columns, [dict(zip(columns, (parse_cell(c) for c in row))) for row in rows[1:]]


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the same directory and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".report.json")


def write_report(report: Report, path, fmt: str = "csv") -> list:
    """Write ``report`` and return the paths written.

    ``csv`` writes the records to ``path`` and the verdicts with provenance
    to ``<path>.report.json``; ``json`` writes everything to ``path``.
    """
    if fmt == "json":
        atomic_write(path, report.to_json())
        return [Path(path)]
    atomic_write(path, report.to_csv())
    side = sidecar_path(path)
    atomic_write(side, report.to_json(include_records=False))
    return [Path(path), side]


def render(report: Report, fmt: str = "csv") -> str:
    return report.to_json() if fmt == "json" else report.to_csv()


def read_report_csv(path) -> tuple:
    with open(path, newline="") as fh:
        return parse_csv(fh.read())


def load_json_report(path) -> dict:
    with open(path) as fh:
        return json.load(fh)

