"""Closed-form references for characteristic polynomial averages."""
from .contour import QuadratureConfig, cbe2_quadrature, contour_quadrature_k1
from .hard_edge import HardEdgeScan, hard_edge_limit, hard_edge_scan, hard_edge_terms
from .polynomials import christoffel_darboux_laguerre, jacobi_polynomial, monic_laguerre
from .series import (SeriesParams, cl_series, jacobi_series, laguerre_series, map_beta14,
                     normalized_series, product_series, reference_series, series_params_for)

__all__ = [
    "QuadratureConfig", "cbe2_quadrature", "contour_quadrature_k1",
    "HardEdgeScan", "hard_edge_limit", "hard_edge_scan", "hard_edge_terms",
    "christoffel_darboux_laguerre", "jacobi_polynomial", "monic_laguerre",
    "SeriesParams", "cl_series", "jacobi_series", "laguerre_series", "map_beta14", "normalized_series",
    "product_series", "reference_series", "series_params_for",
]
