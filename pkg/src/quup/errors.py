"""Exception hierarchy shared by all modules."""


class QuupError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QuupError, ValueError):
    """An input lies outside the physical or mathematical domain of an operation."""


class GeometryError(QuupError, ValueError):
    """Path legs or apparatus geometry are inconsistent."""


class DataError(QuupError, ValueError):
    """Sampled input data is malformed (non-finite, unsorted, too short)."""


class NumericError(QuupError, ArithmeticError):
    """A numerical procedure failed to reach its requested accuracy."""

    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class ConfigError(QuupError, ValueError):
    """A run configuration could not be parsed or failed validation."""
