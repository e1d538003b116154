"""AST node types for BlockScript programs.

Every statement carries its source position so validation and runtime
diagnostics can point back at the offending line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Position:
    line: int
    column: int

    def __str__(self):
        return f"line {self.line}, column {self.column}"


# image sources for `take picture`
@dataclass(frozen=True)
class CameraSource:
    pass


@dataclass(frozen=True)
class FileSource:
    path: str


ImageSource = Union[CameraSource, FileSource]


# training sources for `learn`
@dataclass(frozen=True)
class CurrentImage:
    pass


@dataclass(frozen=True)
class FolderSource:
    path: str


LearnSource = Union[CurrentImage, FolderSource]


# conditions
@dataclass(frozen=True)
class VarEquals:
    var: str
    value: str


@dataclass(frozen=True)
class ResultEquals:
    label: str


@dataclass(frozen=True)
class ResultUnknown:
    pass


Condition = Union[VarEquals, ResultEquals, ResultUnknown]


# statements
@dataclass(frozen=True)
class CreateWisard:
    pos: Position


@dataclass(frozen=True)
class Say:
    text: str
    pos: Position


@dataclass(frozen=True)
class Ask:
    var: str
    pos: Position


@dataclass(frozen=True)
class AcquireImage:
    source: ImageSource
    pos: Position


@dataclass(frozen=True)
class Learn:
    label: str
    source: LearnSource
    pos: Position


@dataclass(frozen=True)
class Recognize:
    pos: Position


@dataclass(frozen=True)
class ShowMentalImage:
    label: str
    pos: Position


@dataclass(frozen=True)
class RepeatForever:
    body: "Program"
    pos: Position


@dataclass(frozen=True)
class If:
    condition: Condition
    then_block: "Program"
    else_block: "Program | None"
    pos: Position


Statement = Union[
    CreateWisard,
    Say,
    Ask,
    AcquireImage,
    Learn,
    Recognize,
    ShowMentalImage,
    RepeatForever,
    If,
]


@dataclass(frozen=True)
class Program:
    statements: tuple[Statement, ...]

    def walk(self):
        """Yield every statement in source (lexical) order, descending into
        loop and branch bodies."""
        for stmt in self.statements:
            yield stmt
            if isinstance(stmt, RepeatForever):
                yield from stmt.body.walk()
            elif isinstance(stmt, If):
                yield from stmt.then_block.walk()
                if stmt.else_block is not None:
                    yield from stmt.else_block.walk()
