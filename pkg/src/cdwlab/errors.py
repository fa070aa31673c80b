"""Exception types raised by cdwlab.

每个异常携带一个简短的 ``category``，CLI 用它输出诊断信息。
"""

from __future__ import annotations

from typing import Sequence

__all__ = [
    "CdwlabError",
    "DomainError",
    "ConvergenceError",
    "ConsistencyError",
    "AccuracyError",
    "PoleProximityError",
    "DegenerateFitError",
    "AlignmentError",
    "UndefinedMetricError",
    "ConfigError",
]


class CdwlabError(Exception):
    """Base class for every error raised by the package."""

    category = "error"


class DomainError(CdwlabError, ValueError):
    """Input outside the domain of an operation."""

    category = "domain"


class ConvergenceError(CdwlabError, RuntimeError):
    """Root search or iteration failed; ``interval`` is the searched range."""

    category = "no-convergence"

    def __init__(self, message: str, interval: Sequence[float] | None = None):
        self.interval = tuple(interval) if interval is not None else None
        if self.interval is not None:
            message = f"{message} (interval {self.interval[0]:.6g}..{self.interval[1]:.6g})"
        super().__init__(message)


class ConsistencyError(CdwlabError):
    """A derived object no longer matches its inputs (e.g. stale solution)."""

    category = "consistency"


class AccuracyError(CdwlabError, ArithmeticError):
    """Requested accuracy was not reached; ``estimate`` is the best value."""

    category = "accuracy"

    def __init__(self, message: str, estimate: float, error: float):
        self.estimate = estimate
        self.error = error
        super().__init__(f"{message} (estimate {estimate:.17g}, error {error:.3g})")


class PoleProximityError(DomainError):
    category = "pole-proximity"


class DegenerateFitError(CdwlabError):
    category = "degenerate-fit"


class AlignmentError(CdwlabError, ValueError):
    category = "alignment"


class UndefinedMetricError(CdwlabError):
    category = "undefined-metric"


class ConfigError(CdwlabError):
    """Bad command line or config file; maps to exit code 2."""

    category = "usage"
