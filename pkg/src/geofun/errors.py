"""Exception types shared across the package."""


class GeofunError(Exception):
    """Base class for all package errors."""


class DomainError(GeofunError, ValueError):
    """An input lies outside the domain where an operation is defined."""


class NumericError(GeofunError, ArithmeticError):
    """A numerical procedure failed (non-convergence, non-finite values, blow-up).

    ``diagnostic`` carries structured context for reports.
    """

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = dict(diagnostic or {})
