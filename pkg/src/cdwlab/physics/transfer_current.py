"""Momentum-space kernel, its poles, the matrix element |T_IF| and the
S-S' current-field curve.

The kernel

    f(k) = e^{ikx}·[u·cos u − sin u] / [cos u − (ikx + 1/(kL))·sin u],  u = kL/2

has no pole at k = 0 (the denominator tends to 1/2); for x = 0 its poles
are the real roots of tan u = 2u, and they move into the complex plane as
x grows.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger
from scipy import optimize

from ..errors import DomainError, PoleProximityError
from ..series import CurveSeries, format_provenance, write_table
from .vacuum_landscape import VacuumSolution, derive_scales
from .wavefunctional import WavefunctionalParams

__all__ = [
    "TransferParams",
    "PoleSet",
    "f_kernel",
    "kernel_numerator",
    "kernel_denominator",
    "kernel_denominator_derivative",
    "find_poles",
    "residue_contour",
    "t_if_magnitude",
    "t_if_limit",
    "pair_separation",
    "field_ratio",
    "current_curve",
    "sspair_shape",
    "current_from_matrix_element",
    "transfer_params_from_vacuum",
    "write_pole_report",
    "POLE_REPORT_HEADER",
]

SMALL_KL = 1e-8
POLE_GUARD = 1e-14
POLE_RESIDUAL_TOL = 1e-10
DEFAULT_REGION = (0.0, 20.0)
SCAN_INTERVALS = 200
MAX_NEWTON = 100
CONTINUATION_STEPS = 32
POLE_REPORT_HEADER = ("re_k", "im_k", "abs_g", "re_res", "im_res")


@dataclass(frozen=True, slots=True)
class TransferParams:
    m_star: float = 1.0
    n1: float = 1.0
    alpha: float = 1.0
    L: float = 1.0
    x_bar: float = 1.0
    c1: float = 1.0
    c2: float = 1.0
    delta_s: float = 1.0
    e_star: float = 1.0
    e_t: float = 1.0
    c_v: float = 1.0

    def __post_init__(self) -> None:
        for name in ("m_star", "L", "x_bar", "e_t", "c_v", "c1", "c2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be > 0, got {value}")
        if not 0.0 <= self.n1 <= 1.0:
            raise DomainError(f"n1 must lie in [0, 1], got {self.n1}")
        if not self.alpha >= 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")

    def separation_at(self, E: float) -> float:
        """Pair separation at field ``E`` from Δ_s and e*."""
        return pair_separation(self.delta_s, self.e_star, E)

    @property
    def c_tilde(self) -> float:
        """C̃₁ = C₁·C₂/m*."""
        return self.c1 * self.c2 / self.m_star

    def as_dict(self) -> dict[str, float]:
        out = {name: getattr(self, name) for name in self.__dataclass_fields__}
        out["c_tilde"] = self.c_tilde
        return out


@dataclass(slots=True)
class PoleSet:
    """Poles of the kernel with their residues, sorted by real part."""

    L: float
    x: float
    poles: list[complex] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    residues: list[complex] = field(default_factory=list)
    contour_residues: list[complex] = field(default_factory=list)
    dropped: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.poles)

    def rows(self) -> list[list[float]]:
        return [
            [k.real, k.imag, g, r.real, r.imag]
            for k, g, r in zip(self.poles, self.residuals, self.residues)
        ]


def _check_k(k: complex) -> complex:
    k = complex(k)
    if not (math.isfinite(k.real) and math.isfinite(k.imag)):
        raise DomainError(f"k must be finite, got {k}")
    return k


def kernel_numerator(L: float, x: float, k: complex) -> complex:
    u = k * L / 2.0
    return cmath.exp(1j * k * x) * (u * cmath.cos(u) - cmath.sin(u))


def kernel_denominator(L: float, x: float, k: complex) -> complex:
    u = k * L / 2.0
    return cmath.cos(u) - (1j * k * x + 1.0 / (k * L)) * cmath.sin(u)


def kernel_denominator_derivative(L: float, x: float, k: complex) -> complex:
    u = k * L / 2.0
    s, c = cmath.sin(u), cmath.cos(u)
    return (
        -0.5 * L * s
        - (1j * x - 1.0 / (k * k * L)) * s
        - (1j * k * x + 1.0 / (k * L)) * 0.5 * L * c
    )


def f_kernel(L: float, x: float, k: complex) -> complex:
    """Evaluate f(k); raises PoleProximityError on a pole."""
    if not L > 0:
        raise DomainError(f"L must be > 0, got {L}")
    k = _check_k(k)
    if abs(k * L) < SMALL_KL:
        return 0j
    den = kernel_denominator(L, x, k)
    if abs(den) < POLE_GUARD:
        raise PoleProximityError(f"k = {k} is within {POLE_GUARD:g} of a pole (|g| = {abs(den):.3g})")
    return kernel_numerator(L, x, k) / den


def residue_contour(L: float, x: float, pole: complex, radius: float | None = None, n_points: int = 64) -> complex:
    """Mean of (k − k*)·f(k) over a small circle around ``pole``."""
    if radius is None:
        radius = 1e-3 * max(1.0, abs(pole))
    if not radius > 0 or n_points < 4:
        raise DomainError("contour needs radius > 0 and at least 4 points")
    total = 0j
    for j in range(n_points):
        offset = radius * cmath.exp(2j * math.pi * j / n_points)
        total += offset * f_kernel(L, x, pole + offset)
    return total / n_points


def _real_roots(L: float, lo: float, hi: float, max_count: int | None) -> list[float]:
    """Positive roots u of tan u = 2u on (lo, hi], as values of k = 2u/L."""

    def reduced(u: float) -> float:
        # cos u − sin u/(2u), finite at u = 0
        return math.cos(u) - 0.5 * float(np.sinc(u / math.pi))

    grid = np.linspace(lo, hi, SCAN_INTERVALS + 1)
    values = [reduced(float(u)) for u in grid]
    roots: list[float] = []
    for a, b, ga, gb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if ga == 0.0 and a > lo:
            roots.append(float(a))
        elif ga * gb < 0.0:
            roots.append(float(optimize.brentq(reduced, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)))
        if max_count is not None and len(roots) >= max_count:
            break
    return [2.0 * u / L for u in roots]


def _newton(L: float, x: float, k: complex) -> complex | None:
    for _ in range(MAX_NEWTON):
        step = kernel_denominator(L, x, k) / kernel_denominator_derivative(L, x, k)
        k -= step
        if not (math.isfinite(k.real) and math.isfinite(k.imag)):
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(k)):
            return k
    return k if abs(kernel_denominator(L, x, k)) < POLE_RESIDUAL_TOL else None


def _continue_pole(L: float, x: float, k0: float) -> complex | None:
    """Follow a real x = 0 root to the target ``x`` in small steps."""
    k = complex(k0)
    for step in range(1, CONTINUATION_STEPS + 1):
        xs = x * step / CONTINUATION_STEPS
        moved = _newton(L, xs, k)
        if moved is None:
            return None
        k = moved
        logger.debug("pole continuation x={:.6g}: k={}", xs, k)
    return k


def find_poles(
    L: float,
    x: float = 0.0,
    region: tuple[float, float] = DEFAULT_REGION,
    max_count: int | None = None,
) -> PoleSet:
    """Poles of f whose |Re u| lies in ``region``, mirrored to ±k.

    x = 0 gives the real roots of tan u = 2u. Otherwise each real root is
    continued in x by Newton iteration on the full denominator; a branch
    that fails to converge is dropped and recorded in ``dropped``.
    """
    lo, hi = region
    if not (0.0 <= lo < hi <= 20.0):
        raise DomainError(f"region must lie within (0, 20], got {region}")
    if not L > 0:
        raise DomainError(f"L must be > 0, got {L}")

    seeds = _real_roots(L, lo, hi, max_count)
    result = PoleSet(L=L, x=x)
    candidates: list[complex] = []
    for k0 in seeds:
        for start in (k0, -k0):
            if x == 0.0:
                k = _newton(L, 0.0, complex(start))
            else:
                k = _continue_pole(L, x, start)
            if k is None:
                message = f"pole seeded at k={start:.6g} lost during continuation to x={x:g}"
                logger.warning(message)
                result.dropped.append(message)
                continue
            residual = abs(kernel_denominator(L, x, k))
            if residual >= POLE_RESIDUAL_TOL:
                message = f"pole near k={k} rejected, |g| = {residual:.3g}"
                logger.warning(message)
                result.dropped.append(message)
                continue
            candidates.append(k)

    for k in sorted(candidates, key=lambda z: (z.real, z.imag)):
        residue = kernel_numerator(L, x, k) / kernel_denominator_derivative(L, x, k)
        result.poles.append(k)
        result.residuals.append(abs(kernel_denominator(L, x, k)))
        result.residues.append(residue)
        result.contour_residues.append(residue_contour(L, x, k))
    logger.debug("found {} poles for L={:g}, x={:g}", len(result), L, x)
    return result


def write_pole_report(poles: PoleSet, path: str | Path) -> Path:
    provenance = format_provenance("eq41", "poles", {"L": poles.L, "x": poles.x})
    frame = pd.DataFrame(poles.rows(), columns=list(POLE_REPORT_HEADER), dtype=float)
    return write_table(path, frame, provenance)


def _envelope(tp: TransferParams, n1_sq: float) -> float:
    """cosh(2√(x̄/2L) − √(L/2x̄))·exp(−α·L·n1²·L/(2x̄))."""
    ratio = tp.L / tp.x_bar
    shape = math.cosh(2.0 * math.sqrt(0.5 / ratio) - math.sqrt(0.5 * ratio))
    return shape * math.exp(-tp.alpha * tp.L * n1_sq * ratio / 2.0)


def t_if_magnitude(tp: TransferParams) -> float:
    """|T_IF| = (1/m*)·(n1² − n1⁴/2)·C₁C₂·envelope."""
    n1_sq = tp.n1 * tp.n1
    prefactor = (2.0 / (2.0 * tp.m_star)) * (n1_sq - 0.5 * n1_sq * n1_sq)
    return prefactor * tp.c1 * tp.c2 * _envelope(tp, n1_sq)


def t_if_limit(tp: TransferParams) -> float:
    """n1 = 1 form C̃₁·envelope, without the factor ½ of the general prefactor.

    Exactly twice :func:`t_if_magnitude` at n1 = 1.
    """
    return tp.c_tilde * _envelope(tp, 1.0)


def pair_separation(delta_s: float, e_star: float, E: float) -> float:
    """L = (2Δ_s/e*)/E."""
    if not E > 0:
        raise DomainError(f"field must be > 0, got {E}")
    if e_star == 0:
        raise DomainError("effective charge must be non-zero")
    return 2.0 * delta_s / e_star / E


def field_ratio(c_v: float, e_t: float, E: float) -> float:
    """L/x̄ = c_v·E_T/E."""
    if not E > 0:
        raise DomainError(f"field must be > 0, got {E}")
    return c_v * e_t / E


def _check_grid(E_grid) -> np.ndarray:
    grid = np.asarray(E_grid, dtype=float)
    bad = np.flatnonzero(~(grid > 0))
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"field grid point {i} is not positive ({grid[i]})")
    return grid


def sspair_shape(tau: float, E):
    """cosh(√(2E/τ) − √(τ/E))·exp(−τ/E), with the E → 0⁺ limit 0."""
    if not tau > 0:
        raise DomainError(f"effective threshold must be > 0, got {tau}")
    fields = np.asarray(E, dtype=float)
    positive = fields > 0
    safe = np.where(positive, fields, 1.0)
    # cosh·exp combined so large τ/E underflows to 0 instead of inf·0
    arg = np.sqrt(2.0 * safe / tau) - np.sqrt(tau / safe)
    shape = 0.5 * (np.exp(arg - tau / safe) + np.exp(-arg - tau / safe))
    out = np.where(positive, shape, 0.0)
    return float(out) if out.ndim == 0 else out


def current_curve(c_tilde: float, e_t: float, c_v: float, E_grid) -> CurveSeries:
    """I(E) = C̃₁·cosh(√(2E/τ) − √(τ/E))·exp(−τ/E), τ = E_T·c_v."""
    grid = _check_grid(E_grid)
    current = c_tilde * np.asarray(sspair_shape(e_t * c_v, grid), dtype=float)
    return CurveSeries(
        label="sspair_current",
        x=grid,
        y=current,
        x_name="E",
        y_name="I",
        equation="eq47",
        params={"c_tilde": c_tilde, "e_t": e_t, "c_v": c_v},
    )


def current_from_matrix_element(tp: TransferParams, E_grid) -> CurveSeries:
    """:func:`t_if_limit` with L/x̄ = c_v·E_T/E, x̄ and α·L held fixed.

    The ``L_pair`` column is the pair separation (2Δ_s/e*)/E.
    """
    grid = _check_grid(E_grid)
    alpha_l = tp.alpha * tp.L
    values = np.empty_like(grid)
    separation = np.empty_like(grid)
    for i, E in enumerate(grid):
        length = tp.x_bar * field_ratio(tp.c_v, tp.e_t, float(E))
        values[i] = t_if_limit(replace(tp, L=length, alpha=alpha_l / length))
        separation[i] = tp.separation_at(float(E))
    return CurveSeries(
        label="matrix_element_current",
        x=grid,
        y=values,
        x_name="E",
        y_name="I",
        equation="eq43+eq46",
        params={"c_tilde": tp.c_tilde, "e_t": tp.e_t, "c_v": tp.c_v, "alpha_L": alpha_l},
        extra={"L_pair": separation},
    )


def transfer_params_from_vacuum(
    solution: VacuumSolution,
    m_star: float = 1.0,
    n1: float = 1.0,
    x_bar: float = 1.0,
    delta_s: float = 1.0,
    e_star: float = 1.0,
    e_t: float = 1.0,
    c_v: float = 1.0,
) -> TransferParams:
    """Chain the vacuum gap through L, α and the normalization constants."""
    length, alpha = derive_scales(solution.gap_direct)
    wave = WavefunctionalParams(alpha=alpha, L=length, n1=n1)
    tp = TransferParams(
        m_star=m_star,
        n1=n1,
        alpha=alpha,
        L=length,
        x_bar=x_bar,
        c1=wave.c_1,
        c2=wave.c_2,
        delta_s=delta_s,
        e_star=e_star,
        e_t=e_t,
        c_v=c_v,
    )
    logger.info("transfer parameters from gap {:.6g}: L={:.6g}, C~1={:.6g}", solution.gap_direct, length, tp.c_tilde)
    return tp
