"""Numerical toolkit for weighted manifolds, smooth metric measure spaces and their Dirac operators.

Submodules:
    jets, fields, catalog: closed-form fields with exact second-order jets.
    jetcalc: curvature and weighted curvature, conformal and warped constructions.
    massquad: ADM, weighted and warped-product masses by sphere quadrature.
    clifford: gamma matrices and product spinor modules.
    spinconn: spin connections and pointwise Dirac identities.
    torusspec: spectral operators and eigenvalue problems on tori.
"""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DegenerateMetricError, InvalidParameterError, PreconditionError,
                     SmmsError)
from .fields import ChartMetricField, SMMSSpec, WeightField, euclidean_metric, zero_weight

__all__ = [
    "ChartMetricField", "ConvergenceError", "DegenerateMetricError", "InvalidParameterError",
    "PreconditionError", "SMMSSpec", "SmmsError", "WeightField", "__version__", "euclidean_metric",
    "zero_weight",
]
