"""Exception types and the violation record used by every checker."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One failed condition, located by a tuple of names (key, column, ...)."""

    kind: str
    where: tuple
    message: str

    def __str__(self) -> str:
        loc = ", ".join(str(w) for w in self.where)
        return f"[{self.kind}] at ({loc}): {self.message}"


Report = list


class CatDBError(Exception):
    pass


class ValidationError(CatDBError):
    """Raised when a value fails validation; ``report`` itemizes the failures."""

    def __init__(self, report, context: str = ""):
        self.report = list(report)
        head = f"{context}: " if context else ""
        lines = "; ".join(str(v) for v in self.report[:8])
        more = f" (+{len(self.report) - 8} more)" if len(self.report) > 8 else ""
        super().__init__(f"{head}{lines}{more}")


class TotalityError(ValidationError):
    """A finite map is partial on its domain or escapes its codomain."""


class MismatchError(CatDBError):
    """Boundary or classification mismatch between composed values."""


class SizeCapError(CatDBError):
    """An exhaustive search would exceed its configured size cap."""


class InternalError(CatDBError):
    """A construction invariant failed; indicates a bug, not bad input."""


class ParseError(CatDBError):
    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = "<text>"):
        self.line = line
        self.col = col
        self.source = source
        super().__init__(f"{source}:{line}:{col}: {message}")
