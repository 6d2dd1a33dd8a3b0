"""Exception hierarchy.

``NumericalError`` subclasses map to CLI exit code 3, ``PreconditionError``
subclasses to exit code 2.
"""


class ItxError(Exception):
    """Base class for all package errors."""


class PreconditionError(ItxError, ValueError):
    """An argument lies outside the documented admissible range."""


class NumericalError(ItxError, ArithmeticError):
    """A numerical procedure could not meet its tolerance."""


class PoleError(PreconditionError):
    """A gamma argument sits on (or within 1e-8 of) a pole."""


class AccuracyLossError(NumericalError):
    """Cancellation makes the requested accuracy unreachable."""


class ConvergenceError(NumericalError):
    """A series or quadrature did not converge."""


class OverflowRangeError(NumericalError):
    """Argument beyond the configured exponential-growth cap."""


class ConsistencyError(NumericalError):
    """A quantity that must be real carried a non-negligible imaginary part."""


class EnvelopeError(NumericalError):
    """The integrand exceeded its declared exponential envelope."""


class DomainError(PreconditionError):
    """Evaluation requested outside a function's domain."""


class MissingTailError(PreconditionError):
    """A sampled curve without a tail model was used beyond its support."""
