from .diffeq import DiffEqSpec, asymptotic_value, exact_value, solve_first_order
from .enumeration import enumerate_moments, enumerate_sum_law
from .limits import (
    LimitTheoremId,
    branch_law,
    last_step_formulas,
    limit_constants,
    limit_law,
)
from .mixture import Gaussian, MixtureLaw, PointMass
from .moments import MomentSeries, exact_moments
from .special import Diffusivity, classify, log_gamma_ratio, martingale_weight, nu_asymptote, nu_limit, nu_n

__all__ = [
    "DiffEqSpec", "asymptotic_value", "exact_value", "solve_first_order",
    "enumerate_moments", "enumerate_sum_law",
    "LimitTheoremId", "branch_law", "last_step_formulas", "limit_constants", "limit_law",
    "Gaussian", "MixtureLaw", "PointMass",
    "MomentSeries", "exact_moments",
    "Diffusivity", "classify", "log_gamma_ratio", "martingale_weight", "nu_asymptote", "nu_limit", "nu_n",
]
