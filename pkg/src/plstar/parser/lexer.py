"""
Tokenizer for PL program text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import List

from ..errors import PlSyntaxError

KEYWORDS = frozenset(
    {"proc", "var", "call", "if", "then", "else", "fi", "end", "fix", "as", "in", "pad", "frag"}
)

# callee names that are not identifiers
OPERATOR_NAMES = ("+1", "0", "1", "=", "-", "*", "<", "+")


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets plus the 1-based line and column of ``start``."""

    start: int
    end: int
    line: int
    column: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError("span start after end")

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class TokenKind(str, Enum):
    NAME = "name"
    KEYWORD = "keyword"
    PUNCT = "punct"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan


_PATTERN = re.compile(
    r"(?P<ws>[ \t\r]+)"
    r"|(?P<nl>\n)"
    r"|(?P<comment>\#[^\n]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>\+1|\d+|[=\-*<+])"
    r"|(?P<punct>[;,()])"
)


def tokenize(text: str) -> List[Token]:
    """Split ``text`` into tokens; the list always ends with an EOF token."""
    tokens: List[Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        match = _PATTERN.match(text, pos)
        if match is None:
            span = SourceSpan(pos, pos + 1, line, pos - line_start + 1)
            raise PlSyntaxError(f"unexpected character {text[pos]!r}", span)
        group = match.lastgroup
        lexeme = match.group()
        span = SourceSpan(pos, match.end(), line, pos - line_start + 1)
        if group == "nl":
            line += 1
            line_start = match.end()
        elif group == "ident":
            kind = TokenKind.KEYWORD if lexeme in KEYWORDS else TokenKind.NAME
            tokens.append(Token(kind, lexeme, span))
        elif group == "op":
            tokens.append(Token(TokenKind.NAME, lexeme, span))
        elif group == "punct":
            tokens.append(Token(TokenKind.PUNCT, lexeme, span))
        pos = match.end()
    tokens.append(Token(TokenKind.EOF, "", SourceSpan(pos, pos, line, pos - line_start + 1)))
    return tokens
