"""Pair-creation probability in D + 1 dimensions for a constant electric field.

w_D(E) = (1 + δ_{D,3})·|E|^{(D+1)/2}/(2π)^D · Σ_n n^{−(D+1)/2}·exp(−nπ/|E|)

with charge and mass scaled to 1. D = 1 sums to a closed logarithm and is
close to linear in E, unlike D = 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from loguru import logger

from ..errors import DomainError, UndefinedMetricError
from ..series import CurveSeries

__all__ = [
    "PairProductionParams",
    "rate",
    "rate_1d_closed",
    "rate_3d_literal",
    "rate_curve",
    "linearity_metric",
    "TAIL_RTOL",
]

TAIL_RTOL = 1e-15
DEFAULT_N_MAX = 200
MIN_METRIC_POINTS = 10


@dataclass(frozen=True, slots=True)
class PairProductionParams:
    dim: int
    e_field: float
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self) -> None:
        if self.dim not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.dim}")
        if not (math.isfinite(self.e_field) and self.e_field > 0):
            raise DomainError(f"field must be > 0, got {self.e_field}")
        if self.n_max < 1:
            raise DomainError(f"n_max must be >= 1, got {self.n_max}")


def _series(power: float, e_field: float, n_max: int) -> float:
    """Σ_{n=1}^{n_max} n^{−power}·q^n, q = exp(−π/E), ascending n.

    Stops once the remainder majorant q^{n+1}/(1 − q) falls below
    TAIL_RTOL of the partial sum.
    """
    q = math.exp(-math.pi / e_field)
    if q == 0.0:
        return 0.0
    tail_scale = 1.0 / (-math.expm1(-math.pi / e_field))
    total = 0.0
    q_n = 1.0
    for n in range(1, n_max + 1):
        q_n *= q
        total += q_n / n**power
        remainder = q_n * q * tail_scale
        if remainder <= TAIL_RTOL * total:
            logger.debug("pair series converged after {} terms (E={:g})", n, e_field)
            break
    return total


def rate(p: PairProductionParams) -> float:
    power = 0.5 * (p.dim + 1)
    prefactor = (2.0 if p.dim == 3 else 1.0) * p.e_field**power / (2.0 * math.pi) ** p.dim
    return prefactor * _series(power, p.e_field, p.n_max)


def rate_1d_closed(e_field: float) -> float:
    """−(|E|/2π)·ln[1 − exp(−π/|E|)]."""
    if not e_field > 0:
        raise DomainError(f"field must be > 0, got {e_field}")
    return -(e_field / (2.0 * math.pi)) * math.log1p(-math.exp(-math.pi / e_field))


def rate_3d_literal(e_field: float, n_max: int = DEFAULT_N_MAX) -> float:
    """|E|²/(4π³)·Σ n^{−2}·exp(−nπ/|E|), the D = 3 case written out."""
    if not e_field > 0:
        raise DomainError(f"field must be > 0, got {e_field}")
    return e_field**2 / (4.0 * math.pi**3) * _series(2.0, e_field, n_max)


def rate_curve(dim: int, E_grid, n_max: int = DEFAULT_N_MAX) -> CurveSeries:
    grid = np.asarray(E_grid, dtype=float)
    values = np.array([rate(PairProductionParams(dim, float(E), n_max)) for E in grid])
    return CurveSeries(
        label=f"w_{dim}d",
        x=grid,
        y=values,
        x_name="E",
        y_name="w",
        equation="eq52" if dim == 1 else ("eq51" if dim == 3 else "eq50"),
        params={"dim": dim, "n_max": n_max},
    )


def linearity_metric(series: CurveSeries) -> float:
    """R² of the least-squares line through the series."""
    if len(series) < MIN_METRIC_POINTS:
        raise DomainError(f"need at least {MIN_METRIC_POINTS} points, got {len(series)}")
    x = series.x
    y = np.real(series.y)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise UndefinedMetricError(f"{series.label}: constant series has no linearity")
    slope, intercept = np.polyfit(x, y, 1)
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    return 1.0 - ss_res / ss_tot
