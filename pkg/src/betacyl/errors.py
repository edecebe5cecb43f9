"""Exception hierarchy shared by every betacyl module."""

from __future__ import annotations


class BetaError(Exception):
    """Base class; ``code`` is the stable name used in structured CLI errors."""

    code = "BetaError"

    def details(self) -> dict:
        return {}


class InvalidBetaSpec(BetaError, ValueError):
    code = "InvalidBetaSpec"


class BudgetExceeded(BetaError):
    code = "BudgetExceeded"


class PrecisionExhausted(BetaError):
    """An order or ceiling decision could not be certified within budget."""

    code = "PrecisionExhausted"

    def __init__(self, message: str, ambiguous: int | None = None):
        super().__init__(message)
        self.ambiguous = ambiguous

    def details(self) -> dict:
        return {} if self.ambiguous is None else {"ambiguous_integer": self.ambiguous}


class NotSelfAdmissible(BetaError, ValueError):
    code = "NotSelfAdmissible"

    def __init__(self, message: str, shift: int | None = None):
        super().__init__(message)
        self.shift = shift

    def details(self) -> dict:
        return {} if self.shift is None else {"shift": self.shift}


class NotAdmissible(BetaError, ValueError):
    code = "NotAdmissible"

    def __init__(self, message: str, word: str | tuple[int, ...] | None = None):
        super().__init__(message)
        if word is not None and not isinstance(word, str):
            word = ",".join(map(str, word))
        self.word = word

    def details(self) -> dict:
        return {} if self.word is None else {"word": self.word}


class ScheduleInfeasible(BetaError):
    code = "ScheduleInfeasible"


class DomainError(BetaError, ValueError):
    code = "DomainError"


class EmptyTail(BetaError, ValueError):
    code = "EmptyTail"


class ConfigParseError(BetaError, ValueError):
    code = "ConfigParseError"

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line

    def details(self) -> dict:
        return {} if self.line is None else {"line": self.line}


class SpikeCheckFailed(BetaError, AssertionError):
    """A constructed point violated its density bracket at block ``k``
    (``k`` is None for a failed full-position check)."""

    code = "AssertionFailure"

    def __init__(self, message: str, k: int | None = None):
        super().__init__(message)
        self.k = k

    def details(self) -> dict:
        return {"k": self.k}
