"""Numerical building blocks shared by the physics modules."""

from .quadrature import integrate_adaptive_simpson, integrate_segments
from .special import erf_eval, erfc_eval

__all__ = [
    "integrate_adaptive_simpson",
    "integrate_segments",
    "erf_eval",
    "erfc_eval",
]
