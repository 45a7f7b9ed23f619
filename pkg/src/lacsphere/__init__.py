"""Discrete spherical averages on Z^d and the arithmetic behind their multipliers."""

from .errors import BudgetError, DomainError, LacSphereError, NumericalIntegrityError, PrecisionError
from .report import LogLogFit, MomentReport, fit_loglog

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "DomainError",
    "LacSphereError",
    "LogLogFit",
    "MomentReport",
    "NumericalIntegrityError",
    "PrecisionError",
    "fit_loglog",
]
