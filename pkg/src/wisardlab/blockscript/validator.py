"""Static checks for BlockScript programs.

The checks are lexical (source order), not control-flow sensitive: a
learning statement is legal only if a `create wisard` appears earlier in
the source, and a recognition needs some `take picture` earlier in the
source. This mirrors positional block-enabling and is deliberately
stricter than necessary for dead branches.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nodes import (
    AcquireImage,
    Ask,
    CreateWisard,
    CurrentImage,
    If,
    Learn,
    Program,
    Recognize,
    ShowMentalImage,
    VarEquals,
)

ERROR = "error"
WARNING = "warning"

LEARN_BEFORE_CREATE = "LEARN_BEFORE_CREATE"
RECOGNIZE_BEFORE_CREATE = "RECOGNIZE_BEFORE_CREATE"
MENTAL_IMAGE_BEFORE_CREATE = "MENTAL_IMAGE_BEFORE_CREATE"
DUPLICATE_CREATE = "DUPLICATE_CREATE"
RECOGNIZE_BEFORE_PICTURE = "RECOGNIZE_BEFORE_PICTURE"
LEARN_BEFORE_PICTURE = "LEARN_BEFORE_PICTURE"
UNBOUND_VARIABLE = "UNBOUND_VARIABLE"


@dataclass(frozen=True)
class ValidationDiagnostic:
    severity: str
    line: int
    column: int
    code: str
    message: str

    def __str__(self):
        return f"{self.severity} [{self.code}] line {self.line}, column {self.column}: {self.message}"


def validate(program: Program) -> list[ValidationDiagnostic]:
    """Return every diagnostic for the program, in source order.

    Errors: learning/recognition/mental-image statements before the
    `create wisard`, recognition or learn-from-picture before any
    `take picture`, and more than one `create wisard`. Warnings: condition
    variables that no `ask` statement binds anywhere in the program.
    """
    diagnostics: list[ValidationDiagnostic] = []
    asked = {stmt.var for stmt in program.walk() if isinstance(stmt, Ask)}

    def report(severity, stmt, code, message):
        diagnostics.append(
            ValidationDiagnostic(severity, stmt.pos.line, stmt.pos.column, code, message)
        )

    seen_create = False
    seen_picture = False
    for stmt in program.walk():
        if isinstance(stmt, CreateWisard):
            if seen_create:
                report(
                    ERROR,
                    stmt,
                    DUPLICATE_CREATE,
                    "a program may have only one 'create wisard' statement",
                )
            seen_create = True
        elif isinstance(stmt, AcquireImage):
            seen_picture = True
        elif isinstance(stmt, Learn):
            if not seen_create:
                report(
                    ERROR,
                    stmt,
                    LEARN_BEFORE_CREATE,
                    "to use 'learn' you must FIRST use 'create wisard'",
                )
            if isinstance(stmt.source, CurrentImage) and not seen_picture:
                report(
                    ERROR,
                    stmt,
                    LEARN_BEFORE_PICTURE,
                    "to learn from a picture you must FIRST use 'take picture'",
                )
        elif isinstance(stmt, Recognize):
            if not seen_create:
                report(
                    ERROR,
                    stmt,
                    RECOGNIZE_BEFORE_CREATE,
                    "to use 'recognize' you must FIRST use 'create wisard'",
                )
            if not seen_picture:
                report(
                    ERROR,
                    stmt,
                    RECOGNIZE_BEFORE_PICTURE,
                    "to use 'recognize' you must FIRST use 'take picture'",
                )
        elif isinstance(stmt, ShowMentalImage):
            if not seen_create:
                report(
                    ERROR,
                    stmt,
                    MENTAL_IMAGE_BEFORE_CREATE,
                    "to show a mental image you must FIRST use 'create wisard'",
                )
        elif isinstance(stmt, If):
            cond = stmt.condition
            if isinstance(cond, VarEquals) and cond.var not in asked:
                report(
                    WARNING,
                    stmt,
                    UNBOUND_VARIABLE,
                    f"variable {cond.var!r} is never bound by an 'ask' statement",
                )
    return diagnostics


def errors_of(diagnostics: list[ValidationDiagnostic]) -> list[ValidationDiagnostic]:
    return [d for d in diagnostics if d.severity == ERROR]
