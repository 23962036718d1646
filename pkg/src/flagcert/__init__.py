"""flagcert - exact flag-algebra certificates for Turán-type density bounds."""

from importlib.metadata import version as _pkg_version

__version__ = _pkg_version("flagcert")

from flagcert.errors import (
    ArgumentError,
    CertificateError,
    FlagcertError,
    Graph6Error,
    IdentityViolation,
    SizeError,
    UnsupportedSizeError,
)
