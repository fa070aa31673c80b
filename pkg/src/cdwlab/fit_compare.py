"""Zener current law, least-squares fits of both current models and
curve comparison.

Both models are ``amplitude × shape(threshold, E)``. The amplitude enters
linearly, so for a trial threshold it has the closed form (s·y)/(s·s); the
fit scans a threshold grid for a seed and refines the threshold with a
Nelder-Mead simplex on the RMSE.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
from loguru import logger
from scipy import optimize

from .errors import AlignmentError, DegenerateFitError, DomainError
from .physics.transfer_current import sspair_shape
from .series import CurveSeries, format_number

__all__ = [
    "Model",
    "ZenerParams",
    "FitResult",
    "CurveComparison",
    "MODEL_PARAMS",
    "zener_current",
    "sspair_current",
    "synthetic_data",
    "fit_curve",
    "default_seed_grid",
    "compare_curves",
    "format_fit_report",
]

Model = Literal["zener", "sspair"]
MODEL_PARAMS: dict[str, tuple[str, str]] = {
    "zener": ("g_p", "e_t"),
    # E_T and c_v only enter through their product
    "sspair": ("c_tilde", "tau"),
}
MIN_FIT_POINTS = 5
MAX_SIMPLEX_ITER = 500
SEED_POINTS = 80
NONZERO = 1e-12


@dataclass(frozen=True, slots=True)
class ZenerParams:
    g_p: float
    e_t: float

    def __post_init__(self) -> None:
        if not self.g_p >= 0:
            raise DomainError(f"G_P must be >= 0, got {self.g_p}")
        if not self.e_t > 0:
            raise DomainError(f"E_T must be > 0, got {self.e_t}")


@dataclass(slots=True)
class FitResult:
    model: str
    params: tuple[float, float]
    rmse: float
    iterations: int
    converged: bool
    seed_params: tuple[float, float] = (math.nan, math.nan)
    seed_rmse: float = math.nan
    n_points: int = 0

    @property
    def param_names(self) -> tuple[str, str]:
        return MODEL_PARAMS[self.model]

    def as_dict(self) -> dict[str, float | int | str | bool]:
        names = self.param_names
        out: dict[str, float | int | str | bool] = {
            "model": self.model,
            names[0]: self.params[0],
            names[1]: self.params[1],
            "rmse": self.rmse,
            "iterations": self.iterations,
            "converged": self.converged,
            "seed_rmse": self.seed_rmse,
            "n_points": self.n_points,
        }
        return out


@dataclass(slots=True)
class CurveComparison:
    rmse: float
    max_rel_diff: float
    overlay: CurveSeries
    compared_points: int = 0

    def as_dict(self) -> dict[str, float | int]:
        return {
            "rmse": self.rmse,
            "max_rel_diff": self.max_rel_diff,
            "compared_points": self.compared_points,
            "n_points": len(self.overlay),
        }


def _zener_shape(threshold: float, E):
    fields = np.asarray(E, dtype=float)
    if np.any(fields < 0):
        raise DomainError("field must be >= 0")
    above = fields > threshold
    safe = np.where(above, fields, 1.0)
    out = np.where(above, (safe - threshold) * np.exp(-threshold / safe), 0.0)
    return float(out) if out.ndim == 0 else out


def zener_current(zp: ZenerParams, E):
    """G_P·(E − E_T)·exp(−E_T/E) above threshold, exactly 0 at or below it."""
    shape = _zener_shape(zp.e_t, E)
    return zp.g_p * shape


def sspair_current(amplitude: float, threshold: float, E):
    """C̃₁·cosh(√(2E/τ) − √(τ/E))·exp(−τ/E) with τ = E_T·c_v as one threshold."""
    return amplitude * sspair_shape(threshold, E)


_SHAPES: dict[str, Callable[[float, np.ndarray], np.ndarray]] = {
    "zener": _zener_shape,
    "sspair": sspair_shape,
}


def _shape_fn(model: str) -> Callable[[float, np.ndarray], np.ndarray]:
    try:
        return _SHAPES[model]
    except KeyError:
        raise DomainError(f"unknown model {model!r}, expected one of {sorted(_SHAPES)}") from None


def synthetic_data(
    model: Model,
    params: tuple[float, float],
    E_grid,
    noise: float = 0.0,
    seed: int = 42,
) -> CurveSeries:
    """Model curve with multiplicative Gaussian noise, y·(1 + noise·N(0, 1)).

    Noise comes from ``numpy.random.default_rng(seed)`` (PCG64), so a given
    seed always reproduces the same data.
    """
    if noise < 0:
        raise DomainError(f"noise must be >= 0, got {noise}")
    grid = np.asarray(E_grid, dtype=float)
    amplitude, threshold = params
    clean = amplitude * np.asarray(_shape_fn(model)(threshold, grid), dtype=float)
    if noise > 0:
        rng = np.random.default_rng(seed)
        clean = clean * (1.0 + noise * rng.standard_normal(grid.size))
    names = MODEL_PARAMS[model]
    return CurveSeries(
        label=f"synthetic_{model}",
        x=grid,
        y=clean,
        x_name="E",
        y_name="I",
        equation="eq49" if model == "zener" else "eq47",
        params={names[0]: amplitude, names[1]: threshold, "noise": noise, "seed": seed},
    )


def default_seed_grid(data: CurveSeries, points: int = SEED_POINTS) -> np.ndarray:
    """Log-spaced thresholds from a tenth of the smallest field to the largest."""
    lo = float(np.min(data.x)) / 10.0
    hi = float(np.max(data.x))
    return np.geomspace(lo, hi, points)


def _profile(shape_fn, threshold: float, x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Best amplitude and RMSE for a fixed threshold."""
    if not (math.isfinite(threshold) and threshold > 0):
        return math.nan, math.inf
    s = np.asarray(shape_fn(threshold, x), dtype=float)
    norm = float(s @ s)
    if norm == 0.0:
        return 0.0, float(np.sqrt(np.mean(y * y)))
    amplitude = float(s @ y) / norm
    residual = amplitude * s - y
    return amplitude, float(np.sqrt(np.mean(residual * residual)))


def fit_curve(
    model: Model,
    data: CurveSeries,
    seed_grid=None,
    max_iter: int = MAX_SIMPLEX_ITER,
) -> FitResult:
    """Fit (amplitude, threshold) of ``model`` to ``data`` by RMSE."""
    shape_fn = _shape_fn(model)
    x = data.x
    y = np.real(np.asarray(data.y)).astype(float)
    if len(data) < MIN_FIT_POINTS:
        raise DomainError(f"need at least {MIN_FIT_POINTS} points, got {len(data)}")
    if np.any(x <= 0):
        raise DomainError("fit data must have E > 0")
    if not np.any(y != 0.0):
        raise DegenerateFitError(f"{data.label}: all ordinates are zero")

    thresholds = default_seed_grid(data) if seed_grid is None else np.asarray(seed_grid, dtype=float)
    best_t, best_a, best_rmse = math.nan, math.nan, math.inf
    for t in thresholds:
        a, rmse = _profile(shape_fn, float(t), x, y)
        if rmse < best_rmse:
            best_t, best_a, best_rmse = float(t), a, rmse
    if not math.isfinite(best_rmse):
        raise DegenerateFitError(f"{data.label}: no admissible seed threshold")
    logger.debug("{} seed: threshold={:.6g}, amplitude={:.6g}, rmse={:.3g}", model, best_t, best_a, best_rmse)

    result = optimize.minimize(
        lambda v: _profile(shape_fn, float(v[0]), x, y)[1],
        x0=np.array([best_t]),
        method="Nelder-Mead",
        options={"maxiter": max_iter, "xatol": 1e-12, "fatol": 1e-15},
    )
    threshold = float(result.x[0])
    amplitude, rmse = _profile(shape_fn, threshold, x, y)
    if not rmse <= best_rmse:
        threshold, amplitude, rmse = best_t, best_a, best_rmse
    converged = bool(result.success) and math.isfinite(rmse)
    if not converged:
        logger.warning("{} fit stopped after {} iterations: {}", model, result.nit, result.message)

    return FitResult(
        model=model,
        params=(amplitude, threshold),
        rmse=rmse,
        iterations=int(result.nit),
        converged=converged,
        seed_params=(best_a, best_t),
        seed_rmse=best_rmse,
        n_points=len(data),
    )


def _overlay_column(series: CurveSeries) -> np.ndarray:
    """Real part scaled to max |y| = 1; an all-zero series stays zero."""
    y = np.real(np.asarray(series.y))
    if not np.any(y):
        logger.warning("{} is zero everywhere, exported unnormalized", series.label)
        return np.zeros_like(y)
    return np.real(series.normalized().y)


def compare_curves(a: CurveSeries, b: CurveSeries) -> CurveComparison:
    """RMSE, largest relative difference and a normalized ``E,I_a,I_b`` overlay."""
    if a.x.shape != b.x.shape or not np.array_equal(a.x, b.x):
        raise AlignmentError(f"{a.label} and {b.label} are sampled on different grids")
    ya = np.real(np.asarray(a.y))
    yb = np.real(np.asarray(b.y))
    rmse = float(np.sqrt(np.mean((ya - yb) ** 2)))

    both = (np.abs(ya) > NONZERO) & (np.abs(yb) > NONZERO)
    if np.any(both):
        max_rel = float(np.max(np.abs(ya[both] - yb[both]) / np.abs(ya[both])))
    else:
        max_rel = 0.0

    overlay = CurveSeries(
        label=f"{a.label}_vs_{b.label}",
        x=a.x.copy(),
        y=_overlay_column(a),
        x_name=a.x_name,
        y_name="I_a",
        equation="compare",
        params={"a": a.label, "b": b.label},
        extra={"I_b": _overlay_column(b)},
    )
    return CurveComparison(rmse=rmse, max_rel_diff=max_rel, overlay=overlay, compared_points=int(np.sum(both)))


def format_fit_report(result: FitResult) -> str:
    """Sorted ``key=value`` lines."""
    items = result.as_dict()
    return "\n".join(f"{key}={format_number(items[key])}" for key in sorted(items)) + "\n"
