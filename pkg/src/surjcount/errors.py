"""Exception hierarchy shared by all modules.

Every exception carries the process exit code the CLI uses for it.
"""


class SurjcountError(Exception):
    exit_code = 1


class GraphFormatError(SurjcountError, ValueError):
    """Malformed graph / lists / instance text."""

    exit_code = 2


class PreconditionError(SurjcountError, ValueError):
    """An operation was called outside its documented domain."""

    exit_code = 3


class InvalidInstanceError(PreconditionError):
    """Anchors do not induce a copy of the target, repeated anchors, etc."""


class GraphTooLargeError(PreconditionError):
    """Graph exceeds the canonicalization or decomposition bound."""


class BudgetExceededError(SurjcountError):
    """Exhaustive enumeration would exceed the configured node budget."""

    exit_code = 4


class NotTractableError(SurjcountError):
    """The requested polynomial-time route does not apply to this target."""

    exit_code = 5


class OracleError(SurjcountError, ArithmeticError):
    """An oracle returned values inconsistent with the reduction
    (singular system, inexact division, non-integral solution)."""

    exit_code = 6


class SearchExhaustedError(SurjcountError):
    """A bounded search ran out of candidates. This says nothing about
    existence beyond the bound."""

    exit_code = 7
