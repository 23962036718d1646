"""Exception hierarchy shared by every flagcert module."""


class FlagcertError(Exception):
    """Base exception for flagcert errors."""


class ArgumentError(FlagcertError, ValueError):
    """An operation was called with arguments outside its domain."""


class SizeError(ArgumentError):
    """A size precondition (vertex count, flag order, matrix dimension) failed."""


class UnsupportedSizeError(SizeError):
    """The requested size is beyond what the brute-force routines support."""


class Graph6Error(FlagcertError, ValueError):
    """Malformed graph6 input."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class CertificateError(FlagcertError, ValueError):
    """A certificate file failed schema or semantic validation."""

    def __init__(self, message: str, field: str | None = None):
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class IdentityViolation(FlagcertError):
    """An exact identity that must hold did not."""
