"""Recursive-descent parser for the LTL text syntax.

Grammar, loosest to tightest::

    formula := disj ('->' formula)?            right associative
    disj    := conj ('|' conj)*                left associative
    conj    := temp ('&' temp)*                left associative
    temp    := unary (('U' | 'R') temp)?       right associative
    unary   := ('!' | 'X' | 'G' | 'F') unary | primary
    primary := 'true' | 'false' | IDENT | '(' formula ')'

Identifiers match ``[a-zA-Z_][a-zA-Z0-9_]*`` but may not start with one of the
uppercase operator letters ``X G F U R``: a word such as ``Xp`` or ``GFa`` is
split into operators, the way common LTL tools read it.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .ltl import (
    FALSE,
    TRUE,
    And,
    Atom,
    Finally,
    Formula,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Release,
    Until,
)

_OPERATOR_LETTERS = "XGFUR"
_TOKEN_RE = re.compile(r"\s+|->|[()!&|]|[A-Za-z_][A-Za-z0-9_]*|.", re.S)

_PRIMARY_START = ("!", "X", "G", "F", "true", "false", "identifier", "(")


class LtlSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: tuple[str, ...]):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"line {line}, column {column}: {message}"
        if self.expected:
            detail += "; expected one of: " + ", ".join(self.expected)
        super().__init__(detail)


@dataclass(frozen=True)
class Token:
    kind: str  # operator text, 'true', 'false', 'identifier' or 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        chunk = m.group()
        col = m.start() - line_start + 1
        if chunk.isspace():
            for i, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = m.start() + i + 1
            continue
        if chunk[0].isalpha() or chunk[0] == "_":
            tokens.extend(_split_word(chunk, line, col))
        elif chunk in ("->", "(", ")", "!", "&", "|"):
            tokens.append(Token(chunk, chunk, line, col))
        else:
            raise LtlSyntaxError(f"unexpected character {chunk!r}", line, col, ())
    tokens.append(Token("eof", "", line, len(text) - line_start + 1))
    return tokens


def _split_word(word: str, line: int, col: int) -> list[Token]:
    out = []
    while word and word[0] in _OPERATOR_LETTERS:
        out.append(Token(word[0], word[0], line, col))
        word, col = word[1:], col + 1
    if word:
        if word in ("true", "false"):
            out.append(Token(word, word, line, col))
        else:
            out.append(Token("identifier", word, line, col))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def fail(self, expected) -> LtlSyntaxError:
        t = self.tok
        what = "end of input" if t.kind == "eof" else f"token {t.text!r}"
        return LtlSyntaxError(f"unexpected {what}", t.line, t.column, tuple(expected))

    def parse(self) -> Formula:
        f = self.formula()
        if self.tok.kind != "eof":
            raise self.fail(("->", "|", "&", "U", "R", "end of input"))
        return f

    def formula(self) -> Formula:
        left = self.disj()
        if self.tok.kind == "->":
            self.advance()
            return Implies(left, self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.tok.kind == "|":
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.temporal()
        while self.tok.kind == "&":
            self.advance()
            f = And(f, self.temporal())
        return f

    def temporal(self) -> Formula:
        left = self.unary()
        if self.tok.kind == "U":
            self.advance()
            return Until(left, self.temporal())
        if self.tok.kind == "R":
            self.advance()
            return Release(left, self.temporal())
        return left

    def unary(self) -> Formula:
        kind = self.tok.kind
        ctor = {"!": Not, "X": Next, "G": Globally, "F": Finally}.get(kind)
        if ctor is not None:
            self.advance()
            return ctor(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        t = self.tok
        if t.kind == "true":
            self.advance()
            return TRUE
        if t.kind == "false":
            self.advance()
            return FALSE
        if t.kind == "identifier":
            self.advance()
            return Atom(t.text)
        if t.kind == "(":
            self.advance()
            f = self.formula()
            if self.tok.kind != ")":
                raise self.fail((")", "->", "|", "&", "U", "R"))
            self.advance()
            return f
        raise self.fail(_PRIMARY_START)


def parse(text: str) -> Formula:
    """Parse LTL text into a :class:`~goalbc.ltl.Formula`."""
    return _Parser(text).parse()
