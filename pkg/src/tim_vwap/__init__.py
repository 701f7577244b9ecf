"""Optimal VWAP execution under a linear transient impact model."""

from . import closed_form, discrete, kernel, quadrature, special_fn
from .errors import DomainError, Infeasible, NotPositiveDefinite, NumericalFailure
from .kernel import Constant, Exponential, PowerLaw, RegularizedPowerLaw

__all__ = [
    "closed_form", "discrete", "kernel", "quadrature", "special_fn",
    "DomainError", "Infeasible", "NotPositiveDefinite", "NumericalFailure",
    "Constant", "Exponential", "PowerLaw", "RegularizedPowerLaw",
]
__version__ = "0.1.0"
