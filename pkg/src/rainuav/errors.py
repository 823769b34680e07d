"""Exception hierarchy shared by the library and the command line."""


class RainUavError(Exception):
    """Base class for all package errors."""


class DomainError(RainUavError, ValueError):
    """An argument lies outside the domain where a model is defined."""


class ConfigurationError(RainUavError, ValueError):
    """A scenario, grid or run configuration is inconsistent."""


class NumericalError(RainUavError, ArithmeticError):
    """A numerical procedure produced non-finite values or failed to converge."""


class FormatError(RainUavError, ValueError):
    """A persisted artifact is corrupt or has an unsupported schema."""


class DigestMismatchError(RainUavError):
    """Artifacts were produced under different physics or configuration."""
