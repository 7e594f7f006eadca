"""Exception hierarchy shared across the package.

Every error raised on purpose derives from :class:`ComoliftError`, so callers
can catch one type at the boundary.  The subclasses split by blame: bad caller
arguments, malformed event descriptions, and unreadable input files.
"""

from __future__ import annotations

__all__ = [
    "ComoliftError",
    "InvalidInputError",
    "InvalidEventError",
    "InputFormatError",
]


class ComoliftError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(ComoliftError, ValueError):
    """An argument violates a documented precondition."""


class InvalidEventError(ComoliftError, ValueError):
    """An event description is malformed (overlap, out-of-range, unknown atom)."""


class InputFormatError(ComoliftError, ValueError):
    """An input file cannot be parsed or fails its format contract."""
