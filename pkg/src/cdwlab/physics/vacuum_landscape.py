"""Extended sine-Gordon potential, its false/true vacua and the energy gap.

V(φ) = Dω_p²·(1 − cos φ) + μ_E·(φ − θ)²

The false vacuum sits just above φ = 0, the true vacuum next to θ ≈ 2π.
The gap is evaluated directly, V(φ_F) − V(φ_T), and through the bracket
route ({ }_A − { }_B)/2; the two only coincide for a calibrated μ_E, which
:func:`calibrate_mu_e` recovers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from loguru import logger
from scipy import optimize

from ..errors import ConsistencyError, ConvergenceError, DomainError
from ..series import CurveSeries

__all__ = [
    "PotentialParams",
    "SolverSettings",
    "VacuumSolution",
    "ThinWallVerdict",
    "GapMethod",
    "potential_value",
    "potential_gradient",
    "potential_curvature",
    "linearized_false_vacuum",
    "solve_vacua",
    "energy_gap",
    "derive_scales",
    "thin_wall_check",
    "calibrate_mu_e",
    "vacuum_scan",
    "THIN_WALL_THRESHOLD",
    "REFERENCE_MU_E",
]

TWO_PI = 2.0 * math.pi
THIN_WALL_THRESHOLD = 50.0
REFERENCE_MU_E = 0.009782

GapMethod = Literal["direct", "bracket"]
_GAP_METHODS = ("direct", "bracket")
DEFAULT_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class PotentialParams:
    """Washboard potential coefficients (Dω_p² scaled to 1 by default)."""

    d_omega2: float = 1.0
    mu_e: float = REFERENCE_MU_E
    theta: float = TWO_PI
    epsilon_plus: float = 1e-5

    def __post_init__(self) -> None:
        if not math.isfinite(self.d_omega2) or self.d_omega2 <= 0:
            raise DomainError(f"d_omega2 must be > 0, got {self.d_omega2}")
        if not math.isfinite(self.mu_e) or self.mu_e < 0:
            raise DomainError(f"mu_e must be >= 0, got {self.mu_e}")
        if not math.isfinite(self.theta):
            raise DomainError(f"theta must be finite, got {self.theta}")
        if not 0 < self.epsilon_plus < 1e-2:
            raise DomainError(f"epsilon_plus must lie in (0, 1e-2), got {self.epsilon_plus}")

    def scaled(self, factor: float) -> "PotentialParams":
        """Multiply both energy coefficients by ``factor``."""
        return PotentialParams(
            d_omega2=self.d_omega2 * factor,
            mu_e=self.mu_e * factor,
            theta=self.theta,
            epsilon_plus=self.epsilon_plus,
        )


@dataclass(frozen=True, slots=True)
class SolverSettings:
    step_tol: float = 1e-12
    residual_tol: float = DEFAULT_RESIDUAL_TOL
    scan_points: int = 64
    max_newton: int = 20

    def __post_init__(self) -> None:
        if self.step_tol <= 0 or self.residual_tol <= 0:
            raise DomainError("solver tolerances must be positive")
        if self.scan_points < 2:
            raise DomainError("scan_points must be >= 2")


@dataclass(frozen=True, slots=True)
class VacuumSolution:
    phi_f: float
    phi_t: float
    residual_f: float
    residual_t: float
    gap_direct: float
    gap_bracket: float
    bracket_a: float
    bracket_b: float
    phi_f_seed: float
    params: PotentialParams = field(default_factory=PotentialParams)

    @property
    def degenerate(self) -> bool:
        """True when false and true vacuum coincide (θ = 0)."""
        return self.phi_f == self.phi_t

    def as_dict(self) -> dict[str, float]:
        return {
            "phi_f": self.phi_f,
            "phi_t": self.phi_t,
            "phi_t_minus_2pi": self.phi_t - TWO_PI,
            "phi_f_seed": self.phi_f_seed,
            "residual_f": self.residual_f,
            "residual_t": self.residual_t,
            "gap_direct": self.gap_direct,
            "gap_bracket": self.gap_bracket,
            "bracket_a": self.bracket_a,
            "bracket_b": self.bracket_b,
        }


@dataclass(frozen=True, slots=True)
class ThinWallVerdict:
    ratio: float
    passed: bool
    threshold: float = THIN_WALL_THRESHOLD


def _check_phi(phi: float) -> None:
    if not math.isfinite(phi):
        raise DomainError(f"phase must be finite, got {phi}")


def potential_value(p: PotentialParams, phi: float) -> float:
    _check_phi(phi)
    return p.d_omega2 * (1.0 - math.cos(phi)) + p.mu_e * (phi - p.theta) ** 2


def potential_gradient(p: PotentialParams, phi: float) -> float:
    _check_phi(phi)
    return p.d_omega2 * math.sin(phi) + 2.0 * p.mu_e * (phi - p.theta)


def potential_curvature(p: PotentialParams, phi: float) -> float:
    _check_phi(phi)
    return p.d_omega2 * math.cos(phi) + 2.0 * p.mu_e


def linearized_false_vacuum(p: PotentialParams) -> float:
    """Small-angle seed: sin φ ≈ φ gives φ_F ≈ [2μ_E/(Dω_p² + 2μ_E)]·θ."""
    return 2.0 * p.mu_e / (p.d_omega2 + 2.0 * p.mu_e) * p.theta


def _minimum_in(
    p: PotentialParams,
    lo: float,
    hi: float,
    seed: float,
    settings: SolverSettings,
) -> float:
    """Locate the first upward zero crossing of dV/dφ on ``[lo, hi]``.

    The interval may hold several stationary points (minimum and barrier
    top); only a minus-to-plus crossing is a minimum.
    """
    grid = np.linspace(lo, hi, settings.scan_points + 1)
    values = [potential_gradient(p, float(phi)) for phi in grid]

    bracket: tuple[float, float] | None = None
    for a, b, ga, gb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if ga == 0.0 and gb > 0.0:
            return float(a)
        if ga < 0.0 <= gb:
            bracket = (float(a), float(b))
            break
    if bracket is None:
        raise ConvergenceError("dV/dphi has no upward sign change", (lo, hi))

    root = optimize.brentq(
        lambda phi: potential_gradient(p, phi),
        bracket[0],
        bracket[1],
        xtol=settings.step_tol,
        rtol=4 * np.finfo(float).eps,
    )
    logger.debug(
        "bracketed minimum in [{:.6g}, {:.6g}] -> {:.15g} (seed {:.6g})",
        bracket[0],
        bracket[1],
        root,
        seed,
    )

    # Newton polish
    for _ in range(settings.max_newton):
        curvature = potential_curvature(p, root)
        if curvature == 0.0:
            break
        step = potential_gradient(p, root) / curvature
        root -= step
        if abs(step) < settings.step_tol:
            break

    residual = abs(potential_gradient(p, root))
    if residual >= _residual_limit(p, settings.residual_tol):
        raise ConvergenceError(f"residual {residual:.3g} above tolerance", (lo, hi))
    return root


def _residual_limit(p: PotentialParams, tol: float) -> float:
    # relative to Dω_p²
    return tol * p.d_omega2


def _false_vacuum(p: PotentialParams, seed: float, settings: SolverSettings) -> float:
    """Scan [ε⁺, π]; a minimum at or below ε⁺ (μ_E → 0) is taken from [0, ε⁺]."""
    edge = p.epsilon_plus
    if potential_gradient(p, edge) >= 0.0:
        logger.debug("false vacuum lies below epsilon_plus={:g}, scanning [0, {:g}]", edge, edge)
        return _minimum_in(p, 0.0, edge, seed, settings)
    return _minimum_in(p, edge, math.pi, seed, settings)


def _brackets(p: PotentialParams, phi_f: float, phi_t: float) -> tuple[float, float]:
    bracket_a = p.d_omega2 * math.cos(phi_f) + 2.0 * p.mu_e
    bracket_b = (2.0 / math.factorial(3)) * phi_f * phi_t * p.d_omega2
    return bracket_a, bracket_b


def _gap_direct(p: PotentialParams, phi_f: float, phi_t: float) -> float:
    if phi_f == phi_t:
        return 0.0
    return potential_value(p, phi_f) - potential_value(p, phi_t)


def _gap_bracket(p: PotentialParams, phi_f: float, phi_t: float) -> float:
    if phi_f == phi_t:
        return 0.0
    bracket_a, bracket_b = _brackets(p, phi_f, phi_t)
    return 0.5 * (bracket_a - bracket_b)


def solve_vacua(p: PotentialParams, settings: SolverSettings | None = None) -> VacuumSolution:
    """Solve dV/dφ = 0 for the false and the true vacuum and fill both gaps."""
    settings = settings or SolverSettings()
    seed = linearized_false_vacuum(p)

    if p.theta == 0.0:
        bracket_a, bracket_b = _brackets(p, 0.0, 0.0)
        return VacuumSolution(
            phi_f=0.0,
            phi_t=0.0,
            residual_f=0.0,
            residual_t=0.0,
            gap_direct=0.0,
            gap_bracket=0.0,
            bracket_a=bracket_a,
            bracket_b=bracket_b,
            phi_f_seed=seed,
            params=p,
        )
    if p.mu_e == 0.0:
        raise DomainError("mu_e must be > 0 unless theta == 0")

    phi_f = _false_vacuum(p, seed, settings)
    phi_t = _minimum_in(p, TWO_PI - 1.0, TWO_PI + 1.0, TWO_PI, settings)
    bracket_a, bracket_b = _brackets(p, phi_f, phi_t)

    solution = VacuumSolution(
        phi_f=phi_f,
        phi_t=phi_t,
        residual_f=abs(potential_gradient(p, phi_f)),
        residual_t=abs(potential_gradient(p, phi_t)),
        gap_direct=_gap_direct(p, phi_f, phi_t),
        gap_bracket=_gap_bracket(p, phi_f, phi_t),
        bracket_a=bracket_a,
        bracket_b=bracket_b,
        phi_f_seed=seed,
        params=p,
    )
    logger.debug("vacua solved: {}", solution.as_dict())
    return solution


def energy_gap(
    p: PotentialParams,
    s: VacuumSolution,
    method: GapMethod = "direct",
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> float:
    """ΔE_gap by the direct route (V(φ_F) − V(φ_T)) or the bracket route.

    ``residual_tol`` is relative to Dω_p², like the solver tolerance.
    """
    if method not in _GAP_METHODS:
        raise DomainError(f"unknown gap method {method!r}, expected one of {_GAP_METHODS}")
    for name, phi in (("phi_f", s.phi_f), ("phi_t", s.phi_t)):
        residual = abs(potential_gradient(p, phi))
        if residual >= _residual_limit(p, residual_tol):
            raise ConsistencyError(
                f"solution is stale for these parameters: |dV/dphi({name})| = {residual:.3g}"
            )
    if method == "direct":
        return _gap_direct(p, s.phi_f, s.phi_t)
    return _gap_bracket(p, s.phi_f, s.phi_t)


def derive_scales(gap: float) -> tuple[float, float]:
    """Pair separation L = 1/ΔE_gap and α = 1/L."""
    if not math.isfinite(gap) or gap <= 0:
        raise DomainError(f"gap must be > 0, got {gap}")
    length = 1.0 / gap
    return length, 1.0 / length


def thin_wall_check(p: PotentialParams, threshold: float = THIN_WALL_THRESHOLD) -> ThinWallVerdict:
    """Dω_p² ≫ μ_E, read as ratio >= ``threshold``."""
    if p.mu_e == 0.0:
        return ThinWallVerdict(ratio=math.inf, passed=True, threshold=threshold)
    ratio = p.d_omega2 / p.mu_e
    verdict = ThinWallVerdict(ratio=ratio, passed=ratio >= threshold, threshold=threshold)
    if not verdict.passed:
        logger.warning("thin-wall condition fails: Dω²/μ_E = {:.4g} < {:g}", ratio, threshold)
    return verdict


def _route_difference(mu_e: float, d_omega2: float, theta: float, settings: SolverSettings) -> float:
    solution = solve_vacua(PotentialParams(d_omega2=d_omega2, mu_e=mu_e, theta=theta), settings)
    return solution.gap_direct - solution.gap_bracket


def calibrate_mu_e(
    d_omega2: float = 1.0,
    theta: float = TWO_PI,
    bracket: tuple[float, float] = (1e-3, 2e-2),
    settings: SolverSettings | None = None,
) -> float:
    """μ_E for which the direct and the bracket gap coincide."""
    settings = settings or SolverSettings()
    lo, hi = bracket
    if not 0 < lo < hi:
        raise DomainError(f"invalid mu_e bracket {bracket}")
    f_lo = _route_difference(lo, d_omega2, theta, settings)
    f_hi = _route_difference(hi, d_omega2, theta, settings)
    if f_lo == 0.0 and f_hi == 0.0:
        raise ConvergenceError("gap routes coincide on the whole bracket (degenerate vacua)", bracket)
    if f_lo * f_hi > 0:
        raise ConvergenceError("gap routes do not cross", bracket)
    mu_e = optimize.brentq(
        _route_difference, lo, hi, args=(d_omega2, theta, settings), xtol=1e-14
    )
    logger.info("calibrated mu_e = {:.10g} (d_omega2={:g}, theta={:.6g})", mu_e, d_omega2, theta)
    return float(mu_e)


def vacuum_scan(
    mu_values: np.ndarray,
    d_omega2: float = 1.0,
    theta: float = TWO_PI,
    settings: SolverSettings | None = None,
) -> tuple[CurveSeries, CurveSeries]:
    """Gap by both routes over a grid of μ_E values."""
    mu_values = np.asarray(mu_values, dtype=float)
    direct = np.empty_like(mu_values)
    bracket = np.empty_like(mu_values)
    for i, mu_e in enumerate(mu_values):
        solution = solve_vacua(PotentialParams(d_omega2=d_omega2, mu_e=float(mu_e), theta=theta), settings)
        direct[i] = solution.gap_direct
        bracket[i] = solution.gap_bracket
    params = {"d_omega2": d_omega2, "theta": theta}
    return (
        CurveSeries("gap_direct", mu_values, direct, "mu_e", "gap", "eq11a", params),
        CurveSeries("gap_bracket", mu_values, bracket, "mu_e", "gap", "eq8-10", params),
    )
