"""
PL program text: tokens, signature environments, parsing and printing.
"""

from .lexer import SourceSpan, Token, TokenKind, tokenize
from .parser import Parser, load_program, parse, term_from_sexpr
from .printer import Printer, print_term
from .signatures import SigEntry, SigEnv, parse_entry

__all__ = [
    "Parser",
    "Printer",
    "SigEntry",
    "SigEnv",
    "SourceSpan",
    "Token",
    "TokenKind",
    "load_program",
    "parse",
    "parse_entry",
    "print_term",
    "term_from_sexpr",
    "tokenize",
]
