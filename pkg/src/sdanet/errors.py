"""Exception types shared across the package."""


class SdanetError(Exception):
    """Base class for package-specific errors."""


class ShapeError(SdanetError):
    """Operand dimensions do not chain."""


class ContractError(SdanetError):
    """An operation was invoked outside its supported pairing or mode."""


class DataFormatError(SdanetError):
    """A byte stream does not conform to the declared file format."""


class ConfigError(SdanetError):
    """A run configuration failed validation."""


class NumericError(SdanetError):
    """Training produced a non-finite quantity."""


class TimeBudgetExceeded(SdanetError):
    """A trial ran past its wall-time budget."""
