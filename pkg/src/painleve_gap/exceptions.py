"""Exceptions raised by painleve-gap."""
from typing import Any, Dict, Optional


class PainleveGapException(Exception):
    """Base class for all numeric-domain errors of the package."""

    def __init__(self, message: str, **details: Any):
        """Constructor."""
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        """Machine readable representation, used for the CLI error object."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": {key: _plain(value) for key, value in self.details.items()},
        }


class SingularMatrix(PainleveGapException):
    """LU factorization met a zero pivot: the determinant vanishes."""


class DomainError(PainleveGapException):
    """Arguments outside the domain where a formula is defined."""


class BadParameter(PainleveGapException):
    """Parameter outside the validated range."""


class NewtonDiverged(PainleveGapException):
    """Collocation Newton iteration failed to converge."""

    def __init__(self, message: str, residual: Optional[float] = None, **details):
        """Constructor."""
        super().__init__(message, residual=residual, **details)
        self.residual = residual


class StepFailure(PainleveGapException):
    """Adaptive integration stopped, most likely at a pole of the solution."""

    def __init__(self, message: str, last_x: Optional[float] = None, **details):
        """Constructor."""
        super().__init__(message, last_x=last_x, **details)
        self.last_x = last_x


class MissingTranscendent(PainleveGapException):
    """A Painleve transcendent needed by the Lax pair is not available."""


class TailTooLarge(PainleveGapException):
    """The neglected tail of an improper integral exceeds its tolerance."""

    def __init__(self, message: str, tail: float, **details):
        """Constructor."""
        super().__init__(message, tail=tail, **details)
        self.tail = tail


class ConfigError(PainleveGapException):
    """Invalid run configuration."""


class NumericError(PainleveGapException):
    """A numpy or scipy failure that no solver translated, e.g. a NaN input."""

    def __init__(self, message: str, cause: str, **details):
        """Constructor."""
        super().__init__(message, cause=cause, **details)
        self.cause = cause


def _plain(value: Any) -> Any:
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return str(value)
