"""Certified quasi-solution of the Blasius similarity equation."""
from __future__ import annotations

from .quasi import CertifiedValue, FarParams, build_inner, eval_with_envelope, nominal_params, wall_stress
from .special import DomainError, I0_cert, erfc_cert

__version__ = "0.1.0"

__all__ = [
    "CertifiedValue",
    "DomainError",
    "FarParams",
    "I0_cert",
    "build_inner",
    "erfc_cert",
    "eval_with_envelope",
    "nominal_params",
    "wall_stress",
]
