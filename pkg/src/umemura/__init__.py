"""Umemura polynomials for Painleve V: exact construction and verification."""
from .core import (SYMBOLIC, compute_entries, cross_check, sigma_hankel, sigma_recurrence,
                   verify_scaled_toda)
from .exact import BiPoly, RatFunc, exact_div
from .pv import build_rational_solution, pv_parameters, pv_residual, sample_solution

__version__ = "0.1.0"

__all__ = [
    "SYMBOLIC",
    "BiPoly",
    "RatFunc",
    "exact_div",
    "compute_entries",
    "sigma_hankel",
    "sigma_recurrence",
    "cross_check",
    "verify_scaled_toda",
    "pv_parameters",
    "build_rational_solution",
    "pv_residual",
    "sample_solution",
]
