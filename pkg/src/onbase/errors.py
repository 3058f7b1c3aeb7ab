"""Exception types raised across the package."""


class OnbaseError(Exception):
    """Base class for all package errors."""


class InvalidAllocationError(OnbaseError, ValueError):
    """An allocation refers to a user or basestation outside the weight matrix."""


class ContractViolation(OnbaseError, RuntimeError):
    """An online algorithm broke the online execution contract."""


class ConfigError(OnbaseError, ValueError):
    """Bad parameters for an algorithm, generator or experiment."""


class UnsupportedShapeError(OnbaseError, ValueError):
    """The weight matrix shape is outside what a routine supports."""


class TooLargeError(OnbaseError, ValueError):
    """An exhaustive enumeration would exceed its size guard."""
