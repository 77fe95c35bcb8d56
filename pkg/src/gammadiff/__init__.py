"""Gamma difference distribution X = X1 - X2 of independent gamma variables,
with the variance gamma law as a special case."""
from ._accel import backend
from .errors import ConvergenceError, DomainError, PoleError, QuadratureError
from .gdd import GddParams, cdf, char_fn, log_pdf, pdf, pdf_array, pdf_at_zero
from .moments import (abs_moment, moment_binomial_oracle, moment_closed_form, moments_recurrence,
                      pv_inverse_moment)
from .sampler import SamplerState, sample_gamma, sample_gdd, sample_vg
from .specfun import SpecialValue
from .vg import VgParams, from_gdd, to_gdd, vg_moments, vg_pdf

__version__ = "0.1.0"

__all__ = [
    "GddParams", "VgParams", "SpecialValue", "SamplerState",
    "pdf", "pdf_array", "log_pdf", "pdf_at_zero", "cdf", "char_fn",
    "moments_recurrence", "moment_closed_form", "moment_binomial_oracle", "abs_moment",
    "pv_inverse_moment", "to_gdd", "from_gdd", "vg_pdf", "vg_moments",
    "sample_gamma", "sample_gdd", "sample_vg",
    "DomainError", "PoleError", "ConvergenceError", "QuadratureError", "backend",
]
