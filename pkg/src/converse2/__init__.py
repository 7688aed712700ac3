"""Numerical verification of the identities behind a converse theorem for twisted L-functions."""

from .characters import DirichletCharacter, characters_mod, gauss_sum, primitive_characters, ramanujan_sum
from .coefficients import (
    CoefficientSeries,
    eisenstein_coeffs,
    euler_factor_inverse,
    eta_product_coeffs,
    load_coeffs,
    save_coeffs,
)
from .converse_checks import LocalTwistData, build_local_data
from .forms import load_form
from .lfunction import CompletedLContext, Twist, estimate_root_number, lambda_completed
from .suite import SuiteConfig, run_suite

__all__ = [
    "CoefficientSeries",
    "CompletedLContext",
    "DirichletCharacter",
    "LocalTwistData",
    "SuiteConfig",
    "Twist",
    "build_local_data",
    "characters_mod",
    "eisenstein_coeffs",
    "estimate_root_number",
    "eta_product_coeffs",
    "euler_factor_inverse",
    "gauss_sum",
    "lambda_completed",
    "load_coeffs",
    "load_form",
    "primitive_characters",
    "ramanujan_sum",
    "run_suite",
    "save_coeffs",
]
