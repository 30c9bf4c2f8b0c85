"""
Canonical PL text for terms.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

from ..ir.substitution import Substitution, apply_subst
from ..ir.terms import Cond, Fix, Fragment, Local, Pad, Prim, ProcCall, ProcDef, Seq, Term, VarId

INDENT = "    "


def _names(vars_: Sequence[VarId]) -> str:
    return ", ".join(v.name for v in vars_ if not v.is_psi)


class Printer:
    """Renders terms as indented PL text; the output parses back to the same term."""

    def __init__(self, mu_as_subst: bool = False, indent: str = INDENT):
        self.mu_as_subst = mu_as_subst
        self.indent = indent

    def render(self, term: Term) -> str:
        return "\n".join(self._lines(term)) + "\n"

    def _nested(self, term: Optional[Term]) -> List[str]:
        if term is None:
            return []
        return [self.indent + line for line in self._lines(term)]

    def _sequence(self, first: Term, second: Term) -> List[str]:
        head = self._lines(first)
        if isinstance(first, (Seq, Local)) or (isinstance(first, ProcCall) and first.prefix is not None):
            head[0] = "(" + head[0]
            head[-1] = head[-1] + ")"
        head[-1] = head[-1] + ";"
        return head + self._lines(second)

    def _lines(self, term: Term) -> List[str]:
        if isinstance(term, Prim):
            return [f"call {term.name}({_names(term.vars)})"]
        if isinstance(term, Fragment):
            return [f"frag {term.name}({_names(term.vars)})"]
        if isinstance(term, Seq):
            return self._sequence(term.first, term.second)
        if isinstance(term, ProcCall):
            call = f"call {term.proc.name}({_names(term.actuals)})"
            if term.prefix is None:
                return [call]
            return self._sequence(term.prefix, ProcCall(term.proc, term.actuals))
        if isinstance(term, Local):
            names = [term.var]
            body = term.body
            while isinstance(body, Local):
                names.append(body.var)
                body = body.body
            return [f"var {_names(names)};"] + self._lines(body)
        if isinstance(term, Cond):
            lines = [f"if {term.var.name} then"] + self._nested(term.then)
            if term.orelse is not None:
                lines += ["else"] + self._nested(term.orelse)
            return lines + ["fi"]
        if isinstance(term, ProcDef):
            return (
                [f"proc {term.proc.name}({_names(term.formals)});"]
                + self._nested(term.body)
                + [f"end {term.proc.name}"]
            )
        if isinstance(term, Fix):
            if self.mu_as_subst:
                return self._lines(apply_subst(term.body, Substitution({term.used: term.defined})))
            return [f"fix {term.used.name} as {term.defined.name} in"] + self._nested(term.body) + ["end"]
        if isinstance(term, Pad):
            return [f"pad {_names(term.extra)} in"] + self._nested(term.body) + ["end"]
        raise TypeError(f"not a term: {term!r}")


def print_term(term: Term, mu_as_subst: bool = False) -> str:
    """Canonical text of ``term``, newline-terminated."""
    return Printer(mu_as_subst=mu_as_subst).render(term)
