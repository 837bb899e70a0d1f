"""Exception hierarchy.

Contract violations (bad inputs) derive from ``ValueError``; failures of a
numerical self-check derive from ``ArithmeticError``. The CLI maps the first
family to exit code 2 and the second to exit code 3.
"""


class SpdmbiError(Exception):
    """Base class for all package errors."""


class DomainError(SpdmbiError, ValueError):
    """An argument lies outside the domain of the operation."""


class ContractError(SpdmbiError, ValueError):
    """An input violates a structural precondition (e.g. non-Hermitian generator)."""


class UnsupportedDomainError(DomainError):
    """A closed form is not defined for these parameters; use the numerics instead."""


class NumericalConsistencyError(SpdmbiError, ArithmeticError):
    """A numerical invariant (real expectation, unit trace, ...) was violated."""


class StepSizeError(NumericalConsistencyError):
    """Fixed-step integration lost positivity; reduce ``dt``."""


class DegenerateSlopeError(NumericalConsistencyError):
    """The signal slope vanishes, so error-propagation precision is undefined."""
