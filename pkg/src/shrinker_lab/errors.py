"""Exception hierarchy.

Errors split into two families: :class:`UsageError` for inputs outside an
operation's domain, and :class:`ComputationError` for numerical failures.  The
CLI maps them to exit codes 2 and 3.
"""

from __future__ import annotations

from typing import Any


class ShrinkerLabError(Exception):
    code = "error"

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context = context

    def as_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "context": self.context}


class UsageError(ShrinkerLabError, ValueError):
    code = "usage"


class DomainError(UsageError):
    code = "domain"


class DegreeCapError(UsageError):
    code = "degree_cap"


class RegionDescriptorError(UsageError):
    code = "region_descriptor"


class GeneratorNotConstructibleError(UsageError):
    code = "generator_not_constructible"


class ComputationError(ShrinkerLabError, ArithmeticError):
    code = "computation"


class ChartError(ComputationError):
    code = "chart"


class ToleranceError(ComputationError):
    """Quadrature or root-finding did not reach its tolerance."""

    code = "tolerance"


class InsufficientTruncationError(ComputationError):
    code = "insufficient_truncation"


class TruncationError(ComputationError):
    """A truncated domain leaves more Gaussian mass outside than allowed."""

    code = "truncation"


class StepSizeError(ComputationError):
    code = "step_size"

    def __init__(self, message: str, partial: Any = None, **context: Any) -> None:
        super().__init__(message, **context)
        self.partial = partial


class ShootingRangeError(UsageError):
    """Requested target lies outside the range the shooting map reaches."""

    code = "shooting_range"
