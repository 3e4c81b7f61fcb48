"""Exception hierarchy for the rsys package."""

from __future__ import annotations


class RsysError(Exception):
    """Base class for all package-specific errors."""


class SpeciesMismatchError(RsysError):
    """Raised when sets over different species tables are combined."""


class ReactionError(RsysError):
    """Raised when a reaction or system violates a structural invariant."""


class FormatError(RsysError):
    """Raised on malformed textual input; carries a 1-based position."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + where)


class RefusalError(RsysError):
    """Raised when an operation declines to run because a guard tripped.

    The message always states which guard tripped and how to lift it
    (smaller input, explicit force flag, or a different operation).
    """


class BudgetError(RsysError):
    """Raised when an explicit node or step budget was exhausted mid-run."""

    def __init__(self, message: str, visited: int | None = None):
        self.visited = visited
        super().__init__(message)
