"""Exception hierarchy shared by all modules."""


class SubratesError(Exception):
    """Base class for library errors."""


class DomainError(SubratesError, ValueError):
    """Argument outside the domain of the operation."""


class ConstructionError(SubratesError, ValueError):
    """Object cannot be built from the given parameters."""


class RangeError(SubratesError, ValueError):
    """Value outside the sampled range of a monotone function."""


class IntegrationError(SubratesError, ArithmeticError):
    """Adaptive quadrature did not converge.

    ``diagnostics`` carries whatever the integrator reported.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DivergenceError(IntegrationError):
    """The integral is infinite; ``tail`` names the offending end."""

    def __init__(self, message, tail, diagnostics=None):
        super().__init__(message, diagnostics)
        self.tail = tail


class MonotonicityError(SubratesError, ValueError):
    """Sampled values are not strictly increasing."""


class FitError(SubratesError, ValueError):
    """Least-squares fit is degenerate or has invalid data."""


class PreconditionError(SubratesError, ValueError):
    """A hypothesis required by the requested formula is not satisfied."""


class SingularityError(SubratesError, ArithmeticError):
    """A sample hit a singularity of the estimator (e.g. a zero draw)."""


class ExponentOverflowError(SubratesError, OverflowError):
    """An exponent is too large to be represented."""
