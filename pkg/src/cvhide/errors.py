"""Exception and warning types shared across the package."""


class CvhideError(Exception):
    """Base class for package errors."""


class InvalidDimension(CvhideError, ValueError):
    """A Fock cutoff is too small or inconsistent."""


class InvalidParameter(CvhideError, ValueError):
    """A physical parameter lies outside its allowed range."""


class InvalidState(CvhideError, ValueError):
    """An operator fails the checks required of a quantum state."""


class NumericError(CvhideError, ArithmeticError):
    """A computation produced non-finite values or failed to converge."""


class InfeasibleBudget(CvhideError, ValueError):
    """A resource-planning query has no solution.

    Attributes:
        limiting_value: Best accuracy reachable under the fixed resources.
    """

    def __init__(self, message: str, limiting_value: float | None = None):
        super().__init__(message)
        self.limiting_value = limiting_value


class InfeasibleCutoff(CvhideError, ValueError):
    """The Fock cutoff needed for a computation exceeds the allowed maximum."""


class VerificationFailure(CvhideError, AssertionError):
    """A numeric value violates an inequality it must satisfy."""


class TruncationWarning(UserWarning):
    """Fock truncation may have discarded significant weight."""


class GridWarning(UserWarning):
    """A phase-space grid does not cover the tail of the integrand."""
