"""Exception hierarchy shared by the library and the command line front end."""


class BinghamError(Exception):
    """Base class for all package errors."""


class DataValidationError(BinghamError, ValueError):
    """Input data or sufficient statistics fail validation."""


class NumericalFailure(BinghamError, ArithmeticError):
    """A numerical routine did not converge or produced an invalid result."""


class EnvelopeViolation(NumericalFailure):
    """The rejection envelope failed to dominate the target density."""
