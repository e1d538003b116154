"""Lexer and recursive-descent parser for the BlockScript grammar:

    program := stmt*
    stmt    := "create wisard" | "say" STRING | "ask" "->" IDENT
             | "take picture" ("from" "camera" | "from file" STRING)
             | "learn" STRING ("from picture" | "from folder" STRING)
             | "recognize" | "show mental image of" STRING
             | "repeat forever" block | "if" cond block ("else" block)?
    cond    := IDENT "==" STRING | "result" "==" STRING | "result" "is" "unknown"
    block   := "{" stmt* "}"

Comments run from '#' to end of line. Keywords are lowercase words.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nodes import (
    AcquireImage,
    Ask,
    CameraSource,
    Condition,
    CreateWisard,
    CurrentImage,
    FileSource,
    FolderSource,
    If,
    Learn,
    Position,
    Program,
    Recognize,
    RepeatForever,
    ResultEquals,
    ResultUnknown,
    Say,
    ShowMentalImage,
    Statement,
    VarEquals,
)


class BlockScriptSyntaxError(Exception):
    """Parse failure with source position and the tokens that were legal."""

    def __init__(self, message: str, line: int, column: int, expected: tuple[str, ...] = ()):
        self.line = line
        self.column = column
        self.expected = expected
        suffix = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"line {line}, column {column}: {message}{suffix}")


@dataclass(frozen=True)
class _Token:
    kind: str  # "word" | "string" | "punct" | "eof"
    value: str
    line: int
    column: int


_PUNCT = ("->", "==", "{", "}")

STATEMENT_KEYWORDS = (
    "create",
    "say",
    "ask",
    "take",
    "learn",
    "recognize",
    "show",
    "repeat",
    "if",
)


def _is_word_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_word_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
        elif c.isspace():
            i += 1
            col += 1
        elif c == "#":
            while i < n and source[i] != "\n":
                i += 1
        elif c == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            out = []
            while True:
                if i >= n or source[i] == "\n":
                    raise BlockScriptSyntaxError(
                        "unterminated string literal", start_line, start_col, ('"',)
                    )
                ch = source[i]
                if ch == "\\":
                    if i + 1 >= n or source[i + 1] not in ('"', "\\"):
                        raise BlockScriptSyntaxError(
                            "bad string escape", line, col, ('\\"', "\\\\")
                        )
                    out.append(source[i + 1])
                    i += 2
                    col += 2
                    continue
                if ch == '"':
                    i += 1
                    col += 1
                    break
                out.append(ch)
                i += 1
                col += 1
            tokens.append(_Token("string", "".join(out), start_line, start_col))
        elif _is_word_start(c):
            start_col = col
            j = i
            while j < n and _is_word_char(source[j]):
                j += 1
            tokens.append(_Token("word", source[i:j], line, start_col))
            col += j - i
            i = j
        else:
            for punct in _PUNCT:
                if source.startswith(punct, i):
                    tokens.append(_Token("punct", punct, line, col))
                    i += len(punct)
                    col += len(punct)
                    break
            else:
                raise BlockScriptSyntaxError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._pos = 0

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _next(self) -> _Token:
        tok = self._tokens[self._pos]
        if tok.kind != "eof":
            self._pos += 1
        return tok

    def _fail(self, tok: _Token, message: str, expected: tuple[str, ...] = ()):
        raise BlockScriptSyntaxError(message, tok.line, tok.column, expected)

    def _expect_word(self, word: str) -> _Token:
        tok = self._next()
        if tok.kind != "word" or tok.value != word:
            self._fail(tok, f"got {tok.value!r}" if tok.value else "got end of input", (word,))
        return tok

    def _expect_punct(self, punct: str) -> _Token:
        tok = self._next()
        if tok.kind != "punct" or tok.value != punct:
            self._fail(tok, f"got {tok.value!r}" if tok.value else "got end of input", (punct,))
        return tok

    def _expect_string(self, what: str) -> str:
        tok = self._next()
        if tok.kind != "string":
            self._fail(tok, f"{what} must be a quoted string", ("STRING",))
        return tok.value

    def _expect_ident(self, what: str) -> str:
        tok = self._next()
        if tok.kind != "word":
            self._fail(tok, f"{what} must be an identifier", ("IDENT",))
        if tok.value == "result":
            self._fail(tok, "'result' is reserved for the recognition result")
        return tok.value

    def parse_program(self, *, top_level: bool, opened_at: Position | None = None) -> Program:
        statements: list[Statement] = []
        while True:
            tok = self._peek()
            if tok.kind == "eof":
                if not top_level:
                    assert opened_at is not None
                    self._fail(
                        tok,
                        f"unterminated block opened at {opened_at}",
                        ("}",),
                    )
                break
            if tok.kind == "punct" and tok.value == "}":
                if top_level:
                    self._fail(tok, "'}' without a matching '{'")
                break
            statements.append(self._statement())
        return Program(tuple(statements))

    def _block(self) -> Program:
        brace = self._expect_punct("{")
        program = self.parse_program(
            top_level=False, opened_at=Position(brace.line, brace.column)
        )
        self._expect_punct("}")
        return program

    def _statement(self) -> Statement:
        tok = self._next()
        pos = Position(tok.line, tok.column)
        if tok.kind != "word":
            self._fail(tok, f"got {tok.value!r}", STATEMENT_KEYWORDS)
        word = tok.value
        if word == "create":
            self._expect_word("wisard")
            return CreateWisard(pos)
        if word == "say":
            return Say(self._expect_string("say text"), pos)
        if word == "ask":
            self._expect_punct("->")
            return Ask(self._expect_ident("ask target"), pos)
        if word == "take":
            self._expect_word("picture")
            self._expect_word("from")
            src = self._next()
            if src.kind == "word" and src.value == "camera":
                return AcquireImage(CameraSource(), pos)
            if src.kind == "word" and src.value == "file":
                return AcquireImage(FileSource(self._expect_string("file path")), pos)
            self._fail(src, f"got {src.value!r}", ("camera", "file"))
        if word == "learn":
            label = self._expect_string("learn label")
            self._expect_word("from")
            src = self._next()
            if src.kind == "word" and src.value == "picture":
                return Learn(label, CurrentImage(), pos)
            if src.kind == "word" and src.value == "folder":
                return Learn(label, FolderSource(self._expect_string("folder path")), pos)
            self._fail(src, f"got {src.value!r}", ("picture", "folder"))
        if word == "recognize":
            return Recognize(pos)
        if word == "show":
            self._expect_word("mental")
            self._expect_word("image")
            self._expect_word("of")
            return ShowMentalImage(self._expect_string("label"), pos)
        if word == "repeat":
            self._expect_word("forever")
            return RepeatForever(self._block(), pos)
        if word == "if":
            condition = self._condition()
            then_block = self._block()
            else_block = None
            nxt = self._peek()
            if nxt.kind == "word" and nxt.value == "else":
                self._next()
                else_block = self._block()
            return If(condition, then_block, else_block, pos)
        self._fail(tok, f"unknown keyword {word!r}", STATEMENT_KEYWORDS)

    def _condition(self) -> Condition:
        tok = self._next()
        if tok.kind != "word":
            self._fail(tok, f"got {tok.value!r}", ("IDENT", "result"))
        if tok.value == "result":
            nxt = self._next()
            if nxt.kind == "punct" and nxt.value == "==":
                return ResultEquals(self._expect_string("result label"))
            if nxt.kind == "word" and nxt.value == "is":
                self._expect_word("unknown")
                return ResultUnknown()
            self._fail(nxt, f"got {nxt.value!r}", ("==", "is"))
        self._expect_punct("==")
        return VarEquals(tok.value, self._expect_string("comparison value"))


def parse(source: str) -> Program:
    """Parse BlockScript source into a Program.

    Raises BlockScriptSyntaxError with line/column and the expected tokens
    on the first syntax error.
    """
    return _Parser(_tokenize(source)).parse_program(top_level=True)
