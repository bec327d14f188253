"""Exception hierarchy shared across the package.

CLI exit codes map onto these: usage errors exit 1, FormatError 2,
ValidationError 3, anything else 4.
"""


class SceneError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(SceneError):
    """Malformed, truncated, or otherwise unparseable interchange file."""


class MissingKeyError(FormatError):
    """A required record key is absent from an embedding archive."""


class ValidationError(SceneError):
    """A domain invariant or operation precondition was violated."""


class UsageError(SceneError):
    """Bad command-line usage."""
