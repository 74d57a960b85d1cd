"""Exception types raised across the package."""


class CTAPError(Exception):
    """Base class for all package errors."""


class DomainError(CTAPError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DegenerateError(CTAPError, ValueError):
    """Geometry or couplings leave the three-state eigensystem undefined."""


class IntegrationError(CTAPError, RuntimeError):
    """Time propagation lost too much norm; rerun with more steps."""


class SRIMFormatError(CTAPError, ValueError):
    """SRIM range output could not be parsed."""


class ConfigError(CTAPError, ValueError):
    """Bad key=value configuration or unknown preset."""


class LowStatisticsWarning(UserWarning):
    """Too few recorded ions for reliable straggle statistics."""
