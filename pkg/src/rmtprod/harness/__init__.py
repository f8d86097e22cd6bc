"""Experiment configuration, runners, reports and the command line interface."""
from .config import ExperimentConfig
from .report import Report, Verdict, parse_csv, write_report
from .runners import (run, run_analytic, run_compare, run_estimate, run_hard_edge,
                      run_quadrature_identity, run_sample)

__all__ = [
    "ExperimentConfig", "Report", "Verdict", "parse_csv", "write_report", "run",
    "run_analytic", "run_compare", "run_estimate", "run_hard_edge",
    "run_quadrature_identity", "run_sample",
]
