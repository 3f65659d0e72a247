"""Exception hierarchy shared by the library and the CLI."""


class SbpSatError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(SbpSatError, ValueError):
    """Invalid grid sizes, layouts, or user configuration."""


class MediaError(SbpSatError, ValueError):
    """Media parameters that make the discrete energy indefinite."""


class DerivationError(SbpSatError, RuntimeError):
    """No operator family satisfies the constraint set on the accuracy ladder."""


class NumericalError(SbpSatError, RuntimeError):
    """Non-finite values detected during time stepping."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step
