"""
Exception hierarchy for the log-gas toolkit.
"""
from typing import Optional


class LogGasError(Exception):
    """Base class for every error raised by the toolkit."""


class DuplicatePoint(LogGasError):
    """Two coordinates of a configuration coincide."""


class NonFinite(LogGasError):
    """A coordinate is NaN or infinite."""


class CardinalityMismatch(LogGasError):
    """Two configurations that must have equal size do not."""


class WindowNesting(LogGasError):
    """The inner window is not contained in the outer one."""


class DomainError(LogGasError):
    """An argument lies outside the domain of a formula."""


class SingularOverlap(LogGasError):
    """A moved point lands on a fixed point; the Gibbs weight vanishes."""


class InvalidSchedule(LogGasError):
    """A chain schedule or radius schedule is malformed."""


class ExteriorOverlap(LogGasError):
    """An exterior point lies inside the resampled window."""


class TooLarge(LogGasError):
    """The requested exact computation is too expensive."""


class DegenerateWeight(LogGasError):
    """Every sampled Gibbs weight is zero."""


class CombinatorialBlowup(LogGasError):
    """A Campbell enumeration exceeds the configured tuple cap."""


class SupportOverflow(LogGasError):
    """A scaled test function reaches outside the sampled domain."""


class ConfigParseError(LogGasError):
    """The experiment config is not a valid JSON document."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ConfigValidationError(LogGasError):
    """A config field has an invalid value or is unknown."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field
