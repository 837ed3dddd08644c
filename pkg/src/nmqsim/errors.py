"""Exception types shared across the package."""
from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class GridError(ValueError):
    """A time or frequency grid does not meet a precondition."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to converge.

    Carries the best available error estimate in `estimate` when known.
    """

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class StiffnessError(NumericalError):
    """Adaptive step size underflowed during ODE integration."""


class ConfigError(ValueError):
    """A run configuration failed to parse or validate.

    `field` names the offending entry when known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
