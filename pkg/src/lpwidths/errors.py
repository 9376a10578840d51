"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class RangeError(ArithmeticError):
    """The requested result is not finite (e.g. an inverse that diverges)."""


class UnsupportedBoundaryError(DomainError):
    """Argument sits exactly on a case boundary the formula does not cover."""


class NumericalError(RuntimeError):
    """An iterative numerical routine failed to converge."""


class DegenerateEstimateError(ArithmeticError):
    """A Monte Carlo estimate cannot be formed (zero weights, zero denominator)."""
