"""Exception types raised across the package."""


class FrfBandError(Exception):
    """Base class for all errors raised by frfband."""


class ValidationError(FrfBandError, ValueError):
    """Input violates a documented precondition."""


class IncommensurableGridError(ValidationError):
    """Frequencies share no common rational base at the configured resolution."""


class AliasingError(ValidationError):
    """Requested sampling would alias one of the analysis frequencies."""


class AlignmentError(ValidationError):
    """Time grid is not bin-aligned with the frequency grid."""


class NoExcitationError(ValidationError):
    """Stimulus carries no power, so no transfer function is defined."""


class GroupFormatError(FrfBandError, ValueError):
    """A group file violates the documented delimited-text layout.

    Carries the 1-based row and column of the offending field when known
    (0 means "not applicable").
    """

    def __init__(self, message, row=0, column=0):
        position = ""
        if row:
            position = f" (row {row}" + (f", column {column})" if column else ")")
        super().__init__(message + position)
        self.row = row
        self.column = column


class ResultFormatError(FrfBandError, ValueError):
    """A result document is truncated, malformed, or of an unknown version."""
