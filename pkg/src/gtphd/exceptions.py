"""Exception types raised across the package."""


class GtphdError(Exception):
    """Base class for all package errors."""


class DomainError(GtphdError, ValueError):
    """A density or function was evaluated outside its parameter domain."""


class SingularMatrixError(GtphdError, ValueError):
    """A covariance or scale matrix is not positive definite."""


class StructureError(GtphdError, ValueError):
    """Inputs have inconsistent shapes, windows or dimensions."""


class ConfigError(GtphdError, ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
