"""Adaptive Simpson quadrature.

Integrands with jumps are handed over as a list of smooth segments, so the
recursion never has to resolve a discontinuity.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence

from ..errors import AccuracyError

__all__ = ["Segment", "integrate_adaptive_simpson", "integrate_segments"]

Segment = tuple[float, float, Callable[[float], float]]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_DEPTH = 50
# Simpson differences below this relative size are rounding noise
_ROUNDING_FLOOR = 4.0 * 2.220446049250313e-16


def integrate_adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = DEFAULT_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]`` with recursive Simpson subdivision.

    Args:
        f: Integrand, assumed smooth on ``[a, b]``.
        a: Lower bound.
        b: Upper bound.
        tol: Absolute error tolerance.
        max_depth: Maximum recursion depth.

    Returns:
        Tuple of (integral_value, error_estimate).

    Raises:
        AccuracyError: If some interval hit ``max_depth`` before meeting its
            share of the tolerance.
    """
    if a == b:
        return 0.0, 0.0
    if a > b:
        value, error = integrate_adaptive_simpson(f, b, a, tol, max_depth)
        return -value, error

    exhausted = False

    def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
        return h / 3.0 * (fa + 4.0 * fm + fb)

    def _adaptive(
        lo: float,
        hi: float,
        flo: float,
        fmid: float,
        fhi: float,
        whole: float,
        depth: int,
        local_tol: float,
    ) -> tuple[float, float]:
        nonlocal exhausted
        mid = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        fl = f(0.5 * (lo + mid))
        fr = f(0.5 * (mid + hi))
        left = _simpson(flo, fl, fmid, 0.5 * h)
        right = _simpson(fmid, fr, fhi, 0.5 * h)
        error = (left + right - whole) / 15.0

        if abs(error) < local_tol or abs(error) <= _ROUNDING_FLOOR * abs(left + right):
            # Richardson step
            return left + right + error, abs(error)
        if depth >= max_depth:
            exhausted = True
            return left + right + error, abs(error)

        lv, le = _adaptive(lo, mid, flo, fl, fmid, left, depth + 1, 0.5 * local_tol)
        rv, re_ = _adaptive(mid, hi, fmid, fr, fhi, right, depth + 1, 0.5 * local_tol)
        return lv + rv, le + re_

    fa = f(a)
    fb = f(b)
    fm = f(0.5 * (a + b))
    whole = _simpson(fa, fm, fb, 0.5 * (b - a))
    value, error = _adaptive(a, b, fa, fm, fb, whole, 0, tol)
    if exhausted and error > tol:
        raise AccuracyError("adaptive Simpson reached maximum refinement", value, error)
    return value, error


def integrate_segments(
    segments: Sequence[Segment],
    tol: float = DEFAULT_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> tuple[float, float]:
    """Sum adaptive Simpson integrals over consecutive smooth segments.

    The tolerance is shared out in proportion to segment length.
    """
    total_length = sum(abs(b - a) for a, b, _ in segments)
    if total_length == 0.0:
        return 0.0, 0.0

    value = 0.0
    error = 0.0
    for a, b, f in segments:
        share = tol * abs(b - a) / total_length
        if share == 0.0:
            continue
        v, e = integrate_adaptive_simpson(f, a, b, share, max_depth)
        value += v
        error += e
    return value, error
