"""Exception hierarchy shared across the package."""


class IfmemError(Exception):
    """Base class for all package-specific errors."""


class DomainError(IfmemError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class FormatError(IfmemError, ValueError):
    """A file does not conform to the expected on-disk format."""


class ValidationError(IfmemError, ValueError):
    """Well-formed data that violates a semantic invariant."""


class AlignmentError(IfmemError, ValueError):
    """Two traces cannot be compared sample-by-sample."""


class NumericalError(IfmemError, ArithmeticError):
    """A computation produced non-finite intermediate values."""


class DistributionError(IfmemError, ValueError):
    """A parameter distribution cannot produce valid samples."""
