"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class CBCError(Exception):
    """Base class for all errors raised by classbreadth."""


class InvalidPrime(CBCError):
    pass


class NotAPGroup(CBCError):
    pass


class OrderCapExceeded(CBCError):
    pass


class NotNormal(CBCError):
    pass


class NotContained(CBCError):
    pass


class NotElementaryAbelian(CBCError):
    pass


class PreconditionViolated(CBCError):
    pass


class InternalContradiction(CBCError):
    """A step the proof guarantees did not hold; always indicates a bug or bad input f."""


class SelectionExhausted(InternalContradiction):
    pass


class ClFDiverged(CBCError):
    pass


class TrivialGroup(CBCError):
    pass


class NotUnitriangular(CBCError):
    pass


class EnumerationCapExceeded(CBCError):
    """Raised when more normal subgroups exist than the cap allows.

    ``partial`` holds the subgroups found before stopping so callers can
    continue on a flagged sample.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = list(partial or [])


class ParseError(CBCError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason
