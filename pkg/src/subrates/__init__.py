"""Subordinated Markov processes: Bernstein functions, subordinator moments,
rate transfer and Foster-Lyapunov rate calculus."""

from subrates.errors import (
    ConstructionError,
    DivergenceError,
    DomainError,
    ExponentOverflowError,
    FitError,
    IntegrationError,
    MonotonicityError,
    PreconditionError,
    RangeError,
    SingularityError,
    SubratesError,
)

__version__ = "0.1.0"

__all__ = [
    "ConstructionError",
    "DivergenceError",
    "DomainError",
    "ExponentOverflowError",
    "FitError",
    "IntegrationError",
    "MonotonicityError",
    "PreconditionError",
    "RangeError",
    "SingularityError",
    "SubratesError",
    "__version__",
]
