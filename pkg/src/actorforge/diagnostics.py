from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 0

    def __post_init__(self):
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError(f"invalid span {self}")

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


NO_SPAN = SourceSpan("<builtin>", 1, 1, 0)


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # LexError, ParseError, NameError, TypeError, DirectionError, ConnectError
    message: str
    span: SourceSpan
    severity: str = "error"

    def render(self) -> str:
        return f"{self.span}: {self.severity}: {self.kind}: {self.message}"

    def to_json(self) -> dict:
        return {
            "file": self.span.file,
            "line": self.span.line,
            "column": self.span.column,
            "severity": self.severity,
            "kind": self.kind,
            "message": self.message,
        }


class DiagnosticError(Exception):
    """Base for frontend failures; always carries at least one diagnostic."""

    kind = "Error"

    def __init__(self, diagnostics):
        if isinstance(diagnostics, Diagnostic):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(d.render() for d in self.diagnostics))

    @classmethod
    def at(cls, span: SourceSpan, message: str, kind: str | None = None):
        return cls(Diagnostic(kind or cls.kind, message, span))

    @property
    def span(self) -> SourceSpan:
        return self.diagnostics[0].span


class LexError(DiagnosticError):
    kind = "LexError"


class ParseError(DiagnosticError):
    kind = "ParseError"

    def __init__(self, diagnostics, expected=()):
        super().__init__(diagnostics)
        self.expected = frozenset(expected)


class ResolveError(DiagnosticError):
    kind = "ResolveError"

    def kinds(self) -> list[str]:
        return [d.kind for d in self.diagnostics]


class ConnectError(DiagnosticError):
    kind = "ConnectError"


def diagnostics_json(diagnostics) -> str:
    return json.dumps([d.to_json() for d in diagnostics], indent=2)
