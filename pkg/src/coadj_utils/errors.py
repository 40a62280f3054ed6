"""Exception types raised by coadj_utils.

All errors derive from ``CoadjError``, itself a ``ValueError``, so callers
that already guard numeric input with ``except ValueError`` keep working.
"""


class CoadjError(ValueError):
    """Base class for every error raised by the toolkit."""


class ConfigurationError(CoadjError):
    """Invalid or unknown configuration value."""


class ParseError(CoadjError):
    """Malformed textual expression or input record."""


class NonFiniteInputError(CoadjError):
    """Samples or coefficients contain NaN or infinity."""


class OrientationError(CoadjError):
    """A circle map failed the f' > 0 check."""


class TruncationError(CoadjError):
    """Re-truncation dropped more spectral weight than the tolerance allows."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class JetConditionError(CoadjError):
    """A diffeomorphism or generator violates the base-point jet conditions."""


class IntegrationError(CoadjError):
    """An ODE or quadrature routine did not converge."""


class OrderBoundError(CoadjError):
    """A jet order exceeded the configured maximum."""


class UncoveredFieldError(CoadjError):
    """A density involves a field that belongs to no canonical pair."""


class ChainNonTerminationError(CoadjError):
    """The constraint consistency chain exceeded its iteration cap."""


class DomainError(CoadjError):
    """A phase point lies outside the admissible region."""


class SingularWindowError(CoadjError):
    """A closed-form binding is singular on the evaluation window."""


class BlowUpError(CoadjError):
    """Spectral energy grew beyond the configured cap."""
