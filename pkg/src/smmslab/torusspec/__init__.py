"""Spectral discretizations on flat and conformally flat tori."""

from .eigen import EigenResult, dirac_spectrum, spectra_equal
from .grid import AliasingWarning, TorusGrid, random_band_limited, trig_field
from .io import read_grid_field, write_grid_field
from .operators import (GridOperator, curved_dirac, flat_dirac, lichnerowicz_residual,
                        ricci_identity_residual, weighted_dirac)
from .principal import (ConformalTorus, interpolation_report, lambda1, m_coefficient, negative_m_weight,
                        principal_eigenvalue, sin_phi, yamabe_coefficient)

__all__ = [
    "AliasingWarning", "ConformalTorus", "EigenResult", "GridOperator", "TorusGrid", "curved_dirac",
    "dirac_spectrum", "flat_dirac", "interpolation_report", "lambda1", "lichnerowicz_residual",
    "m_coefficient", "negative_m_weight", "principal_eigenvalue", "random_band_limited", "read_grid_field",
    "ricci_identity_residual", "sin_phi", "spectra_equal", "trig_field", "weighted_dirac",
    "write_grid_field", "yamabe_coefficient",
]
