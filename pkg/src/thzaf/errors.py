"""Exception types raised across the package."""


class ThzafError(Exception):
    """Base class for all package errors."""


class DomainError(ThzafError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Gamma-type function evaluated at (or numerically on) a pole."""


class RangeError(ThzafError, ValueError):
    """Lookup outside the range covered by tabulated data."""


class InvalidSpec(ThzafError, ValueError):
    """Malformed Fox H-function specification."""


class PoleOnContour(ThzafError):
    """Integration contour passes through a pole of the integrand."""


class ConvergenceError(ThzafError, ArithmeticError):
    """Numerical integration failed to reach its tolerance."""


class ConsistencyError(ThzafError, ArithmeticError):
    """A computed quantity violates a hard consistency bound (e.g. CDF outside [0, 1])."""


class DegenerateError(ThzafError, ValueError):
    """Asymptotic expansion undefined at a parameter boundary."""


class EmptyBatch(ThzafError, ValueError):
    """Statistics requested from an empty sample batch."""
