"""Thin-wall S-S' phase profile and its momentum-space coefficients.

The profile φ₀(x) = π·[tanh b(x − x_a) + tanh b(x_b − x)] is a 2π plateau of
width L = x_b − x_a. Its spectrum is the transform of a box,

    φ(k) = √(2/π)·sin(kL/2)/k,

sampled on the midpoint grid k_n = (n − ½)·2π/L. The plain grid 2πn/L lands
on the zeros sin(πn) = 0 and annihilates every coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from loguru import logger

from ..errors import DomainError
from ..numerics.quadrature import DEFAULT_TOL, Segment, integrate_segments
from ..series import CurveSeries

__all__ = [
    "ProfileSpec",
    "BoxProfile",
    "box_profile",
    "ModeGrid",
    "Weight",
    "phase_profile",
    "mode_coefficient",
    "build_mode_grid",
    "action_position_space",
    "action_momentum_space",
    "reconstruct_profile",
    "profile_series",
    "spectrum_series",
    "PLATEAU_MIN_BL",
]

TWO_PI = 2.0 * math.pi
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
PLATEAU_MIN_BL = 4.0
SMALL_KL = 1e-8
TAIL_WIDTHS = 5.0

Weight = Literal["full", "residual"]


@dataclass(frozen=True, slots=True)
class ProfileSpec:
    """Wall steepness b and the two wall centres x_a < x_b."""

    b: float
    x_a: float
    x_b: float

    def __post_init__(self) -> None:
        if not self.b > 0:
            raise DomainError(f"wall steepness b must be > 0, got {self.b}")
        if not self.x_a < self.x_b:
            raise DomainError(f"need x_a < x_b, got {self.x_a} >= {self.x_b}")
        if self.b * self.L < PLATEAU_MIN_BL:
            raise DomainError(
                f"b*L = {self.b * self.L:.4g} < {PLATEAU_MIN_BL:g}: walls overlap, no 2π plateau"
            )

    @classmethod
    def centered(cls, b: float, length: float) -> "ProfileSpec":
        return cls(b=b, x_a=-0.5 * length, x_b=0.5 * length)

    @property
    def L(self) -> float:
        return self.x_b - self.x_a

    @property
    def center(self) -> float:
        return 0.5 * (self.x_a + self.x_b)

    def value(self, x):
        return phase_profile(self, x)

    def segments(self, half_width: float) -> list[Segment]:
        # split at the wall centres so each piece holds at most one wall
        c = self.center
        edges = [c - half_width, self.x_a, self.x_b, c + half_width]
        return [(a, b, self.value) for a, b in zip(edges[:-1], edges[1:]) if b > a]


@dataclass(frozen=True, slots=True)
class BoxProfile:
    """Ideal S-S' box: ``height`` on [−L/2, L/2], zero outside."""

    L: float
    height: float = TWO_PI

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise DomainError(f"box length must be > 0, got {self.L}")

    @property
    def center(self) -> float:
        return 0.0

    def value(self, x):
        inside = np.abs(np.asarray(x, dtype=float)) <= 0.5 * self.L
        out = np.where(inside, self.height, 0.0)
        return float(out) if out.ndim == 0 else out

    def segments(self, half_width: float) -> list[Segment]:
        half = 0.5 * self.L
        height = self.height
        return [
            (-half_width, -half, lambda _x: 0.0),
            (-half, half, lambda _x: height),
            (half, half_width, lambda _x: 0.0),
        ]


Profile = ProfileSpec | BoxProfile


def box_profile(L: float, height: float = TWO_PI) -> BoxProfile:
    return BoxProfile(L=L, height=height)


@dataclass(frozen=True, slots=True)
class ModeGrid:
    """Midpoint momentum grid with the box coefficients φ(k_n)."""

    L: float
    n_max: int
    k: np.ndarray
    coefficients: np.ndarray
    n1: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.n1 <= 1.0:
            raise DomainError(f"n1 must lie in [0, 1], got {self.n1}")
        if self.k.shape != (self.n_max,) or self.coefficients.shape != (self.n_max,):
            raise DomainError("mode grid arrays must have n_max entries")
        if not np.all(np.isfinite(self.coefficients)):
            raise DomainError("mode coefficients must be finite")
        self.k.setflags(write=False)
        self.coefficients.setflags(write=False)

    @property
    def spacing(self) -> float:
        return TWO_PI / self.L

    def weights(self, weight: Weight) -> float:
        if weight == "full":
            return 1.0
        if weight == "residual":
            return 1.0 - self.n1 * self.n1
        raise DomainError(f"unknown weight {weight!r}")


def phase_profile(spec: ProfileSpec, x):
    """π·[tanh b(x − x_a) + tanh b(x_b − x)] for scalar or array ``x``."""
    xs = np.asarray(x, dtype=float)
    out = math.pi * (np.tanh(spec.b * (xs - spec.x_a)) + np.tanh(spec.b * (spec.x_b - xs)))
    return float(out) if out.ndim == 0 else out


def mode_coefficient(L: float, k):
    """√(2/π)·sin(kL/2)/k, with the k → 0 limit √(2/π)·L/2."""
    if not L > 0:
        raise DomainError(f"L must be > 0, got {L}")
    ks = np.asarray(k, dtype=float)
    small = np.abs(ks * L) < SMALL_KL
    safe_k = np.where(small, 1.0, ks)
    out = np.where(small, SQRT_2_OVER_PI * 0.5 * L, SQRT_2_OVER_PI * np.sin(0.5 * safe_k * L) / safe_k)
    return float(out) if out.ndim == 0 else out


def build_mode_grid(L: float, n_max: int, n1: float = 1.0) -> ModeGrid:
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    if not L > 0:
        raise DomainError(f"L must be > 0, got {L}")
    n = np.arange(1, n_max + 1, dtype=float)
    k = (n - 0.5) * (TWO_PI / L)
    coefficients = np.asarray(mode_coefficient(L, k), dtype=float).reshape(n_max)
    return ModeGrid(L=L, n_max=n_max, k=k, coefficients=coefficients, n1=n1)


def action_position_space(
    alpha: float,
    profile: Profile,
    phi_c: float = 0.0,
    half_width: float | None = None,
    tol: float = DEFAULT_TOL,
) -> float:
    """α·∫(φ₀(x) − φ_C)² dx over the profile centre ± ``half_width``.

    ``half_width`` defaults to 5L, where the tanh tails are negligible.
    """
    length = profile.L
    if half_width is None:
        half_width = TAIL_WIDTHS * length
    if half_width < 0.5 * length:
        raise DomainError(f"half_width {half_width} smaller than L/2 = {0.5 * length}")

    integrand: list[Segment] = []
    for a, b, fn in profile.segments(half_width):
        integrand.append((a, b, lambda x, fn=fn: (fn(x) - phi_c) ** 2))
    value, error = integrate_segments(integrand, tol=tol)
    logger.debug("position-space action: {:.15g} (error {:.2g})", alpha * value, error)
    return alpha * value


def action_momentum_space(grid: ModeGrid, weight: Weight = "full") -> float:
    """(2π/L)²·Σ_n w·|φ(k_n)|², summed exactly rounded."""
    w = grid.weights(weight)
    total = math.fsum(float(c) * float(c) for c in grid.coefficients)
    return grid.spacing**2 * w * total


def reconstruct_profile(grid: ModeGrid, x):
    """Inverse cosine transform on the midpoint grid.

    (2/√(2π))·(2π/L)·Σ φ(k_n)·cos(k_n x) recovers the unit box for
    |x| < L/2; the midpoint grid makes the result anti-periodic with
    period L, and it vanishes exactly at x = ±L/2.
    """
    xs = np.asarray(x, dtype=float)
    phases = np.cos(np.multiply.outer(xs, grid.k))
    out = (2.0 / math.sqrt(TWO_PI)) * grid.spacing * (phases @ grid.coefficients)
    return float(out) if out.ndim == 0 else out


def profile_series(spec: ProfileSpec, x=None, n_points: int = 401) -> CurveSeries:
    """Samples of the profile; ``x`` defaults to the centre ± L."""
    if x is None:
        x = np.linspace(spec.center - spec.L, spec.center + spec.L, n_points)
    x = np.asarray(x, dtype=float)
    return CurveSeries(
        label="phase_profile",
        x=x,
        y=phase_profile(spec, x),
        x_name="x",
        y_name="phi",
        equation="eq2",
        params={"b": spec.b, "x_a": spec.x_a, "x_b": spec.x_b},
    )


def spectrum_series(grid: ModeGrid) -> CurveSeries:
    return CurveSeries(
        label="mode_spectrum",
        x=np.array(grid.k),
        y=np.array(grid.coefficients),
        x_name="k",
        y_name="phi_k",
        equation="eq29",
        params={"L": grid.L, "n_max": grid.n_max, "n1": grid.n1},
    )
