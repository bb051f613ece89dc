"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SleepingBeautyError(Exception):
    """Base class for all domain errors raised by this package."""


# -- protocol model ---------------------------------------------------------


class ProtocolError(SleepingBeautyError, ValueError):
    """A protocol violates one or more structural invariants.

    ``violations`` holds every problem found, not only the first one; the
    exception class is that of the first violation.
    """

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = list(violations) if violations else [message]


class ProbabilitySumError(ProtocolError):
    pass


class DanglingReference(ProtocolError):
    pass


class EmptyProtocol(ProtocolError):
    pass


class DuplicateLabel(ProtocolError):
    pass


class InvalidProbability(ProtocolError):
    pass


class UnknownPreset(SleepingBeautyError, ValueError):
    pass


class InvalidParam(SleepingBeautyError, ValueError):
    pass


# -- exact engine -----------------------------------------------------------


class UnknownAgent(SleepingBeautyError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class UnknownOutcomeInProposition(SleepingBeautyError, ValueError):
    pass


class EmptyProposition(SleepingBeautyError, ValueError):
    pass


class NoAwakenings(SleepingBeautyError, ValueError):
    """The per-awakening measure is undefined: the agent is never interviewed."""


# -- monte carlo ------------------------------------------------------------


class NoEvents(SleepingBeautyError, ValueError):
    pass


class ProtocolMismatch(SleepingBeautyError, ValueError):
    pass


# -- wagers -----------------------------------------------------------------


class InvalidWager(SleepingBeautyError, ValueError):
    pass


class DegenerateProposition(SleepingBeautyError, ValueError):
    """Credence is 0 or 1, so no interior breakeven probability exists."""


# -- io ---------------------------------------------------------------------


class ProtocolSyntaxError(SleepingBeautyError, ValueError):
    """Malformed protocol document; the message names the line or path."""

    def __init__(self, message: str, path: str | None = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class RationalFormatError(ProtocolSyntaxError):
    pass


class EmptyReport(SleepingBeautyError, ValueError):
    pass
