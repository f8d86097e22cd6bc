"""Random-matrix products: samplers, characteristic polynomial averages and their closed-form duals."""

__version__ = "0.1.0"

from .algebra import DysonIndex, FieldMatrix, SpectrumWithMultiplicity  # noqa: E402
from .charpoly import (Estimate, EstimateCurve, SourceSpec, estimate_Z,  # noqa: E402
                       estimate_Z_curve, ratio_constancy_test)
from .ensembles import EnsembleSpec, Kind, McmcConfig, ProductSpec, draw  # noqa: E402
from .estimators import MonteCarloCharPoly, SeriesCharPoly  # noqa: E402

__all__ = [
    "DysonIndex", "FieldMatrix", "SpectrumWithMultiplicity",
    "Estimate", "EstimateCurve", "SourceSpec", "estimate_Z", "estimate_Z_curve",
    "ratio_constancy_test", "EnsembleSpec", "Kind", "McmcConfig", "ProductSpec", "draw",
    "MonteCarloCharPoly", "SeriesCharPoly", "__version__",
]
