"""Exception types shared across the package."""

from __future__ import annotations


class AbsmeanError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AbsmeanError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegreeOverflowError(DomainError):
    """A polynomial degree exceeds the supported range."""


class RangeError(AbsmeanError, OverflowError):
    """A result exceeds the representable floating-point range."""


class DataError(AbsmeanError, ValueError):
    """Input data is malformed: non-finite entries, unparseable file contents."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class ConvergenceError(AbsmeanError, RuntimeError):
    """An iterative routine exhausted its iteration budget."""

    def __init__(self, message: str, last_spread: float | None = None):
        super().__init__(message)
        self.last_spread = last_spread


class ConditioningError(AbsmeanError, RuntimeError):
    """A linear system is too ill-conditioned to trust."""

    def __init__(self, message: str, condition_estimate: float | None = None):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class IntegrationError(AbsmeanError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, achieved_tolerance: float | None = None):
        super().__init__(message)
        self.achieved_tolerance = achieved_tolerance


class ConstructionError(AbsmeanError, RuntimeError):
    """A constructive procedure produced an object that fails its own checks."""


class PreconditionError(AbsmeanError, ValueError):
    """A verification routine was invoked with its stated precondition violated."""
