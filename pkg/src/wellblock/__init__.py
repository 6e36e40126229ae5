"""Equivalent well-block radii for steady, pseudo-steady and
boundary-dominated flow, glued to a finite-difference coarse grid through
the material-balance identity of the well block."""

from ._backend import BACKEND
from .core import (FluidRockParams, Geometry, GridSpec, MBCoefficients,
                   MBSample, RadialAnnulus, RadiusSolution, Regime, Slab1D,
                   SolveMethod, ValidatedProblem, validate_problem)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "FluidRockParams", "Geometry", "GridSpec", "MBCoefficients",
    "MBSample", "RadialAnnulus", "RadiusSolution", "Regime", "Slab1D",
    "SolveMethod", "ValidatedProblem", "validate_problem", "__version__",
]
