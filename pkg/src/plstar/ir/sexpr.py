"""
Canonical s-expression form of terms, plus a small generic s-expression reader.

Writer forms::

    (seq P Q)  (cond x P Q)  (local x P)  (procdef p (formals...) P)
    (call p (actuals...) P?)  (fix u v P)  (frag X (vars...))
    (prim name (vars...))  (pad (vars...) P)

An empty branch or prefix is written ``()``.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Union

from ..errors import PlSyntaxError
from .terms import Cond, Fix, Fragment, Local, Pad, Prim, ProcCall, ProcDef, Seq, Term, VarId


class Quoted(str):
    """A string literal read from ``"..."``, kept apart from bare atoms."""


SExpr = Union[str, Quoted, List["SExpr"]]


def _names(vars_: Sequence[VarId]) -> str:
    return "(" + " ".join(v.name for v in vars_) + ")"


def to_sexpr(term: Optional[Term]) -> str:
    """Serialize a term on a single line."""
    if term is None:
        return "()"
    if isinstance(term, Fragment):
        return f"(frag {term.name} {_names(term.vars)})"
    if isinstance(term, Prim):
        return f"(prim {term.name} {_names(term.vars)})"
    if isinstance(term, Seq):
        return f"(seq {to_sexpr(term.first)} {to_sexpr(term.second)})"
    if isinstance(term, Cond):
        return f"(cond {term.var.name} {to_sexpr(term.then)} {to_sexpr(term.orelse)})"
    if isinstance(term, Local):
        return f"(local {term.var.name} {to_sexpr(term.body)})"
    if isinstance(term, ProcDef):
        return f"(procdef {term.proc.name} {_names(term.formals)} {to_sexpr(term.body)})"
    if isinstance(term, ProcCall):
        head = f"(call {term.proc.name} {_names(term.actuals)}"
        return head + (f" {to_sexpr(term.prefix)})" if term.prefix is not None else ")")
    if isinstance(term, Fix):
        return f"(fix {term.used.name} {term.defined.name} {to_sexpr(term.body)})"
    if isinstance(term, Pad):
        return f"(pad {_names(term.extra)} {to_sexpr(term.body)})"
    raise TypeError(f"not a term: {term!r}")


def _tokens(text: str) -> List[tuple]:
    tokens: List[tuple] = []
    i = 0
    line, col = 1, 1
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            tokens.append((ch, line, col))
            i += 1
            col += 1
            continue
        if ch == '"':
            j = i + 1
            chars = []
            while j < len(text) and text[j] != '"':
                if text[j] == "\\" and j + 1 < len(text):
                    j += 1
                    chars.append({"n": "\n", "t": "\t"}.get(text[j], text[j]))
                else:
                    chars.append(text[j])
                j += 1
            if j >= len(text):
                raise PlSyntaxError(f"unterminated string at line {line}, column {col}")
            literal = "".join(chars)
            tokens.append((Quoted(literal), line, col))
            newlines = text.count("\n", i, j + 1)
            if newlines:
                line += newlines
                col = j + 1 - text.rfind("\n", i, j + 1)
            else:
                col += j + 1 - i
            i = j + 1
            continue
        j = i
        while j < len(text) and not text[j].isspace() and text[j] not in '()";':
            j += 1
        tokens.append((text[i:j], line, col))
        col += j - i
        i = j
    return tokens


def read_sexprs(text: str) -> List[SExpr]:
    """Read every top-level s-expression in ``text``. ``;`` starts a comment."""
    stack: List[List[SExpr]] = [[]]
    opened: List[tuple] = []
    for token, line, col in _tokens(text):
        if isinstance(token, Quoted):
            stack[-1].append(token)
        elif token == "(":
            stack.append([])
            opened.append((line, col))
        elif token == ")":
            if len(stack) == 1:
                raise PlSyntaxError(f"unbalanced ')' at line {line}, column {col}")
            done = stack.pop()
            opened.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(token)
    if len(stack) != 1:
        line, col = opened[-1]
        raise PlSyntaxError(f"unclosed '(' opened at line {line}, column {col}")
    return stack[0]


def read_sexpr(text: str) -> SExpr:
    """Read exactly one s-expression."""
    items = read_sexprs(text)
    if len(items) != 1:
        raise PlSyntaxError(f"expected one s-expression, found {len(items)}")
    return items[0]
