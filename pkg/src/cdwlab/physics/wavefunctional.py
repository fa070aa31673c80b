"""Gaussian wavefunctionals for the initial and final S-S' configurations.

Only one momentum mode is retained, so each functional reduces to

    Ψ_i = C_i·exp(−{ }_i·φ(k)²),   { }_i = (α/L)·(2π)²·w_i,

with w₁ = 1 for the initial state and w₂ = 1 − n₁² for the final state. The
constants C_i normalize Ψ_i on [0, L/√(2π)].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from ..errors import DomainError
from ..numerics.special import erf_eval
from ..series import CurveSeries

__all__ = [
    "Which",
    "WavefunctionalParams",
    "integration_limit",
    "normalization_constant",
    "default_brackets",
    "log_amplitude",
    "amplitude",
    "wavefunction",
    "amplitude_profile",
    "second_variation_kernel",
]

TWO_PI_SQ = (2.0 * math.pi) ** 2

Which = Literal["initial", "final"]


def integration_limit(L: float) -> float:
    """Upper phase limit √(L²/2π) of the normalization integral."""
    if not L > 0:
        raise DomainError(f"L must be > 0, got {L}")
    return L / math.sqrt(2.0 * math.pi)


def normalization_constant(a: float, L: float) -> float:
    """C = [∫₀^{b} exp(−2a·φ²) dφ]^{−1/2} with b = L/√(2π).

    The integral is ½·√(π/2a)·erf(b·√(2a)).
    """
    if not a > 0:
        raise DomainError(f"quadratic coefficient must be > 0, got {a}")
    b_lim = integration_limit(L)
    root = math.sqrt(2.0 * a)
    integral = 0.5 * math.sqrt(math.pi) / root * erf_eval(b_lim * root)
    return 1.0 / math.sqrt(integral)


def _normalization_or_flat(a: float, L: float) -> float:
    # a = 0 is the flat functional (n1 = 1 final state); use the a → 0⁺ limit
    if a == 0.0:
        return 1.0 / math.sqrt(integration_limit(L))
    return normalization_constant(a, L)


def default_brackets(alpha: float, L: float, n1: float) -> tuple[float, float]:
    scale = alpha / L * TWO_PI_SQ
    return scale, scale * (1.0 - n1 * n1)


@dataclass(frozen=True, slots=True)
class WavefunctionalParams:
    alpha: float
    L: float
    n1: float = 1.0
    bracket_1: float | None = None
    bracket_2: float | None = None
    c_1: float = field(init=False)
    c_2: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if not self.L > 0:
            raise DomainError(f"L must be > 0, got {self.L}")
        if not 0.0 <= self.n1 <= 1.0:
            raise DomainError(f"n1 must lie in [0, 1], got {self.n1}")
        d1, d2 = default_brackets(self.alpha, self.L, self.n1)
        b1 = d1 if self.bracket_1 is None else self.bracket_1
        b2 = d2 if self.bracket_2 is None else self.bracket_2
        if not b1 > 0:
            raise DomainError(f"initial bracket must be > 0, got {b1}")
        if b2 < 0:
            raise DomainError(f"final bracket must be >= 0, got {b2}")
        object.__setattr__(self, "bracket_1", b1)
        object.__setattr__(self, "bracket_2", b2)
        object.__setattr__(self, "c_1", _normalization_or_flat(b1, self.L))
        object.__setattr__(self, "c_2", _normalization_or_flat(b2, self.L))

    def bracket(self, which: Which) -> float:
        value = self.bracket_1 if _branch(which) == 1 else self.bracket_2
        assert value is not None
        return value

    def constant(self, which: Which) -> float:
        return self.c_1 if _branch(which) == 1 else self.c_2

    def weight(self, which: Which) -> float:
        return 1.0 if _branch(which) == 1 else 1.0 - self.n1 * self.n1


def _branch(which: str) -> int:
    if which == "initial":
        return 1
    if which == "final":
        return 2
    raise DomainError(f"which must be 'initial' or 'final', got {which!r}")


def log_amplitude(p: WavefunctionalParams, coeff_sq_sum: float, which: Which) -> float:
    """−(α/L)·(2π)²·w·Σ|φ(k)|².

    The (1 − n₁²) weight sits on the final functional.
    """
    if coeff_sq_sum < 0:
        raise DomainError(f"coefficient square sum must be >= 0, got {coeff_sq_sum}")
    value = -(p.alpha / p.L) * TWO_PI_SQ * p.weight(which) * coeff_sq_sum
    return value + 0.0  # normalize -0.0


def amplitude(p: WavefunctionalParams, coeff_sq_sum: float, which: Which) -> float:
    return p.constant(which) * math.exp(log_amplitude(p, coeff_sq_sum, which))


def wavefunction(p: WavefunctionalParams, which: Which, phi):
    """Normalized Ψ_i(φ) = C_i·exp(−{ }_i·φ²)."""
    values = p.constant(which) * np.exp(-p.bracket(which) * np.square(np.asarray(phi, dtype=float)))
    return float(values) if values.ndim == 0 else values


def amplitude_profile(p: WavefunctionalParams, which: Which, n_points: int = 201) -> CurveSeries:
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points}")
    phi = np.linspace(0.0, integration_limit(p.L), n_points)
    return CurveSeries(
        label=f"psi_{which}",
        x=phi,
        y=wavefunction(p, which, phi),
        x_name="phi",
        y_name="psi",
        equation="eq31" if which == "initial" else "eq32",
        params={
            "alpha": p.alpha,
            "L": p.L,
            "n1": p.n1,
            "bracket": p.bracket(which),
            "C": p.constant(which),
        },
    )


def second_variation_kernel(
    p: WavefunctionalParams,
    bracket: float,
    phi_k: float,
    f_val: complex,
    c: float | None = None,
) -> complex:
    """2·C·{ }²·φ(k)²·exp(−{ }·φ(k)²)·f².

    ``c`` defaults to the normalization constant belonging to ``bracket``.
    """
    if not bracket > 0:
        raise DomainError(f"bracket must be > 0, got {bracket}")
    if c is None:
        c = normalization_constant(bracket, p.L)
    phi_sq = phi_k * phi_k
    return 2.0 * c * bracket * bracket * phi_sq * math.exp(-bracket * phi_sq) * complex(f_val) ** 2
