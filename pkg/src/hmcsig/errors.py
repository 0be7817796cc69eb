"""Exception types raised across the toolkit.

Everything derives from ``ValueError`` except I/O problems, which surface as
plain ``OSError`` from the standard library.
"""


class HmcsigError(ValueError):
    """Base class for validation failures."""


class FormatError(HmcsigError):
    """A file could not be parsed. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(HmcsigError):
    """Parsed content does not match the declared structure."""


class DataError(HmcsigError):
    """Numeric content is invalid (e.g. NaN or infinite samples)."""


class NotFoundError(HmcsigError, LookupError):
    """A named item (marker, channel, band) does not exist."""


class AmbiguityError(HmcsigError):
    """A name resolves to more than one item."""


class SingularSystemError(HmcsigError):
    """A linear system could not be solved (e.g. duplicate electrodes)."""
