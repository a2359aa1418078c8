"""Exception hierarchy.

Numerical failures (anything a caller may want to retry with different
settings or inputs) derive from :class:`NumericalError`; malformed inputs
raise plain :class:`ValueError` subclasses.
"""


class NumericalError(Exception):
    """Base class for failures that occur while computing a result."""


class NoIntersection(NumericalError):
    """A light line never meets the observer's worldline inside its domain."""

    def __init__(self, message, chi=None, s=None, pulse=None):
        super().__init__(message)
        self.chi = chi
        self.s = s
        self.pulse = pulse


class ToleranceNotMet(NumericalError):
    """Adaptive refinement ran out of budget, or a guard tripped."""


class OutOfRange(NumericalError):
    """A value lies outside the image of a frame map."""


class DomainError(ValueError):
    """A time lies outside a trajectory's declared domain."""


class EmptyRegion(ValueError):
    """No grid points fall inside the requested region."""


class TooFewRecords(ValueError):
    """Not enough event records to form differences."""
