"""
Custom exceptions for the relkd toolkit.
"""


class RelkdError(Exception):
    """Base exception for relkd errors."""

    pass


class ConfigurationError(RelkdError):
    """Invalid or missing configuration."""

    def __init__(self, message: str, key: str | None = None) -> None:
        self.key = key
        if key is not None and key not in message:
            message = f"{key}: {message}"
        super().__init__(message)


class DimensionError(RelkdError, ValueError):
    """Operand shapes do not compose."""

    pass


class IngestionError(RelkdError):
    """Dataset file could not be parsed."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GradientOracleError(RelkdError):
    """Finite-difference oracle hit a non-finite function value."""

    pass


class TrainingAbortedError(RelkdError):
    """Training produced non-finite values and was stopped."""

    def __init__(self, message: str, epoch: int | None = None, batch: int | None = None) -> None:
        self.epoch = epoch
        self.batch = batch
        super().__init__(f"{message} (epoch={epoch}, batch={batch})")


class LabelError(RelkdError, ValueError):
    """Class id outside [0, C)."""

    pass
