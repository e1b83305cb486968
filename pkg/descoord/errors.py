"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Optional

if TYPE_CHECKING:
    from descoord.services.properties import PropertyVerdict


class DescoordError(Exception):
    """Base class for every error raised by descoord."""


class AlphabetMismatch(DescoordError):
    """Two generators were expected to share one alphabet but do not."""


class AttributeConflict(DescoordError):
    """A shared event is controllable/observable on one side only."""


class AlphabetConstraintViolated(DescoordError):
    """The coordinator alphabet does not satisfy Σ1∩Σ2 ⊆ Σk ⊆ Σ1∪Σ2."""


class PreconditionViolated(DescoordError):
    pass


class MissingProjection(DescoordError):
    pass


class NotConditionallyDecomposable(DescoordError):
    def __init__(self, message: str, verdict: "PropertyVerdict") -> None:
        super().__init__(message)
        self.verdict = verdict


class NonconflictCheckFailed(DescoordError):
    """Raised by the pipeline; ``report`` holds everything computed so far."""

    def __init__(self, message: str, report: Any) -> None:
        super().__init__(message)
        self.report = report


class GeneratorFileError(DescoordError):
    pass


class ParseError(GeneratorFileError):
    def __init__(self, message: str, line: int, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(GeneratorFileError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line
