"""Exception hierarchy shared by every module of the package."""


class MpmcsError(Exception):
    """Base class for all package errors."""


class InputError(MpmcsError, ValueError):
    """An argument violates an operation's precondition."""


class ConfigError(InputError):
    """A generator or CLI configuration is inconsistent."""


class CapacityError(MpmcsError):
    """A problem is too large for the requested operation."""


class ParseError(MpmcsError, ValueError):
    """Malformed input file. ``line`` is 1-based, or None when not line-specific."""

    def __init__(self, message, line=None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


class VerificationError(MpmcsError):
    """A decoded solution failed an internal consistency check."""
