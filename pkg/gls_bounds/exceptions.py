"""Errors raised by GLS Bounds."""

from __future__ import annotations


class GLSBoundsError(Exception):
    """Base class for every error raised on purpose by this package."""


class UnsupportedKindError(GLSBoundsError, ValueError):
    """The operation is not defined for this kind of random variable model."""


class QuadratureFailureError(GLSBoundsError, ArithmeticError):
    """Numerical integration did not produce a usable value."""


class NonIntegrableError(QuadratureFailureError):
    """Quadrature did not converge to the requested tolerance."""

    def __init__(self, msg: str, achieved_error: float) -> None:
        super().__init__(msg)
        self.achieved_error = achieved_error


class InfeasibleError(GLSBoundsError, ValueError):
    """No tau up to the cap satisfies the B(phi) predicate."""


class OutOfDomainError(GLSBoundsError, ValueError):
    """An argument lies outside the domain of a generating function."""


class EmptyDomainError(GLSBoundsError, ValueError):
    """A sup or inf was requested over a set without finite points."""


class DomainError(GLSBoundsError, ValueError):
    """An argument violates the hypothesis of the inequality being evaluated."""


class FamilyMismatchError(GLSBoundsError, ValueError):
    """The tail exponent of a model disagrees with the requested envelope family."""


class UnreliableMomentError(GLSBoundsError, ValueError):
    """A plug-in moment of this order would be dominated by sampling noise."""


class ConfigError(GLSBoundsError, ValueError):
    """The run configuration could not be parsed or validated."""

    def __init__(self, msg: str, line: int | None = None, field: str | None = None) -> None:
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        super().__init__(f"{msg} ({', '.join(location)})" if location else msg)
        self.line = line
        self.field = field
