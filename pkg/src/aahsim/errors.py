"""Exception types shared across the package."""


class AahsimError(Exception):
    """Base class for all package errors."""


class ConfigError(AahsimError, ValueError):
    """Invalid experiment configuration."""


class NumericalError(AahsimError, ArithmeticError):
    """A numerical routine produced unusable output."""


class CalibrationError(NumericalError):
    """A calibration fit did not converge or the data cannot constrain it.

    ``residual`` carries the final residual when one is available.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
