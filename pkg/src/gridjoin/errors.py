"""Exception taxonomy shared across the engine, service, and CLI."""


class GridJoinError(ValueError):
    """Base class for all errors raised by this package."""


class UsageError(GridJoinError):
    """Caller misuse: bad arguments, inconsistent configuration, corrupt
    structural preconditions (CLI exit code 1, HTTP 400)."""


class ParseError(UsageError):
    """Malformed input text. Carries a line number when one is known
    (CLI exit code 1, HTTP 400)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(GridJoinError):
    """Well-formed input that violates data invariants, e.g. a polygon ring
    with fewer than three vertices (CLI exit code 2, HTTP 422)."""
