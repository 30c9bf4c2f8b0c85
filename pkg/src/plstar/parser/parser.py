"""
Recursive descent parser for PL program text, and the s-expression term reader.

Grammar::

    sequence  := 'var' names ';' sequence
               | statement [';' [sequence]]
    statement := 'proc' NAME '(' [names] ')' ';' sequence 'end' NAME
               | 'call' NAME '(' [names] ')'
               | 'if' NAME 'then' [sequence] ['else' [sequence]] 'fi'
               | 'fix' NAME 'as' NAME 'in' sequence 'end'
               | 'pad' names 'in' sequence 'end'
               | 'frag' NAME '(' [names] ')'
               | '(' sequence ')'

``;`` is right-associative and a ``var`` declaration scopes over the rest of
its sequence.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from loguru import logger

from ..errors import IRError, KindError, PlSyntaxError, UndeclaredIdentifier
from ..ir.sexpr import Quoted, SExpr, read_sexpr
from ..ir.terms import (
    PSI,
    Cond,
    Fix,
    Fragment,
    Local,
    Pad,
    Prim,
    ProcCall,
    ProcDef,
    Seq,
    Term,
    VarId,
    effect_from_sig,
)
from ..ir.typesig import DataKind, Sort
from .lexer import SourceSpan, Token, TokenKind, tokenize
from .signatures import SigEntry, SigEnv

_CLOSERS = frozenset({"end", "fi", "else", ")"})


class _Resolver:
    """Name resolution shared by the text parser and the s-expression reader."""

    def __init__(self, env: SigEnv):
        self.env = env
        self._scopes: List[Dict[str, VarId]] = []

    def push(self, vars_: Sequence[VarId]) -> None:
        self._scopes.append({v.name: v for v in vars_})

    def pop(self) -> None:
        self._scopes.pop()

    def local_kind(self, name: str) -> VarId:
        entry = self.env.get(name)
        if entry is not None and entry.role == "var":
            return VarId(name, entry.kind)
        return VarId(name, DataKind(Sort.INT))

    def variable(self, name: str, span: Optional[SourceSpan] = None) -> VarId:
        if name == "psi":
            return PSI
        for scope in reversed(self._scopes):
            if name in scope:
                return scope[name]
        entry = self.env.get(name)
        if entry is None or entry.role != "var":
            raise UndeclaredIdentifier(f"undeclared identifier {name}", span)
        return entry.var()

    def leaf_entry(self, name: str) -> Optional[SigEntry]:
        """The prim declaration for a callee, unless a binder shadows it."""
        if any(name in scope for scope in self._scopes):
            return None
        entry = self.env.get(name)
        return entry if entry is not None and entry.role == "prim" else None

    def callee(self, name: str, actuals: Sequence[VarId], span: Optional[SourceSpan]) -> Term:
        entry = self.leaf_entry(name)
        if entry is not None:
            return self.prim(entry, actuals, span)
        proc = self.variable(name, span)
        if not proc.is_proc:
            raise KindError(f"data variable {name} used as a procedure", span)
        return ProcCall(proc, tuple(actuals), span=span)

    def prim(self, entry: SigEntry, actuals: Sequence[VarId], span: Optional[SourceSpan]) -> Prim:
        plain = [v for v in actuals if not v.is_psi]
        sig = entry.sig
        if len(plain) != sig.arity:
            raise KindError(f"{entry.name} expects {sig.arity} arguments, got {len(plain)}", span)
        for var, arg in zip(plain, sig.args):
            if var.kind != arg.kind:
                raise KindError(f"argument {var.name} of {entry.name} should be {arg.kind}, not {var.kind}", span)
        effect = effect_from_sig(sig, plain, entry.psi_effect)
        vars_ = tuple(plain) + ((PSI,) if entry.psi_effect else ())
        return Prim(entry.name, vars_, effect, span=span)

    def fragment(self, name: str, actuals: Sequence[VarId], span: Optional[SourceSpan]) -> Fragment:
        entry = self.env.get(name)
        if entry is None or entry.role != "frag":
            raise UndeclaredIdentifier(f"undeclared fragment variable {name}", span)
        plain = [v for v in actuals if not v.is_psi]
        if len(plain) != entry.sig.arity:
            raise KindError(f"fragment {name} expects {entry.sig.arity} variables, got {len(plain)}", span)
        effect = effect_from_sig(entry.sig, plain, entry.psi_effect)
        vars_ = tuple(plain) + ((PSI,) if entry.psi_effect else ())
        return Fragment(name, vars_, effect, span=span)

    def formals(self, proc: VarId, names: Sequence[str], span: Optional[SourceSpan]) -> Tuple[VarId, ...]:
        if not proc.is_proc:
            raise KindError(f"{proc.name} is not a procedure variable", span)
        sig = proc.sig
        if len(names) != sig.arity:
            raise KindError(f"{proc.name} is declared with {sig.arity} parameters, defined with {len(names)}", span)
        return tuple(VarId(name, arg.kind) for name, arg in zip(names, sig.args))


class Parser(_Resolver):
    """Parses one program text against a signature environment."""

    def __init__(self, text: str, env: SigEnv):
        super().__init__(env)
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    # token helpers

    def _peek(self) -> Token:
        return self.tokens[self.pos]

    def _previous(self) -> Token:
        return self.tokens[max(self.pos - 1, 0)]

    def _at(self, text: str) -> bool:
        token = self._peek()
        return token.kind in (TokenKind.KEYWORD, TokenKind.PUNCT) and token.text == text

    def _accept(self, text: str) -> bool:
        if self._at(text):
            self.pos += 1
            return True
        return False

    def _expect(self, text: str) -> Token:
        token = self._peek()
        if not self._at(text):
            found = token.text or "end of input"
            raise PlSyntaxError(f"expected '{text}', found '{found}'", token.span)
        self.pos += 1
        return token

    def _name(self) -> Token:
        token = self._peek()
        if token.kind != TokenKind.NAME:
            found = token.text or "end of input"
            raise PlSyntaxError(f"expected a name, found '{found}'", token.span)
        self.pos += 1
        return token

    def _names(self) -> List[Token]:
        names = [self._name()]
        while self._accept(","):
            names.append(self._name())
        return names

    def _arguments(self) -> List[Token]:
        self._expect("(")
        names = [] if self._at(")") else self._names()
        self._expect(")")
        return names

    def _span_from(self, start: Token) -> SourceSpan:
        end = self._previous().span.end
        return SourceSpan(start.span.start, max(end, start.span.start), start.span.line, start.span.column)

    def _at_sequence_end(self) -> bool:
        token = self._peek()
        return token.kind == TokenKind.EOF or (token.text in _CLOSERS and token.kind != TokenKind.NAME)

    # grammar

    def parse(self) -> Term:
        if self._peek().kind == TokenKind.EOF:
            raise PlSyntaxError("empty program", self._peek().span)
        term = self._sequence()
        token = self._peek()
        if token.kind != TokenKind.EOF:
            raise PlSyntaxError(f"unexpected '{token.text}'", token.span)
        return term

    def _sequence(self) -> Term:
        start = self._peek()
        if self._at("var"):
            return self._local()
        first = self._statement()
        if self._accept(";") and not self._at_sequence_end():
            rest = self._sequence()
            return Seq(first, rest, span=self._span_from(start))
        return first

    def _local(self) -> Term:
        start = self._expect("var")
        names = self._names()
        self._expect(";")
        vars_ = [self.local_kind(t.text) for t in names]
        self.push(vars_)
        if self._at_sequence_end():
            raise PlSyntaxError("declaration without a body", self._peek().span)
        body = self._sequence()
        self.pop()
        span = self._span_from(start)
        for var in reversed(vars_):
            body = Local(var, body, span=span)
        return body

    def _statement(self) -> Term:
        token = self._peek()
        handlers = {
            "proc": self._procdef,
            "call": self._call,
            "if": self._cond,
            "fix": self._fix,
            "pad": self._pad,
            "frag": self._frag,
        }
        if token.kind == TokenKind.KEYWORD and token.text in handlers:
            return handlers[token.text]()
        if self._accept("("):
            inner = self._sequence()
            self._expect(")")
            return inner
        found = token.text or "end of input"
        raise PlSyntaxError(f"expected a statement, found '{found}'", token.span)

    def _procdef(self) -> Term:
        start = self._expect("proc")
        name = self._name()
        formal_names = self._arguments()
        self._expect(";")
        proc = self.variable(name.text, name.span)
        formals = self.formals(proc, [t.text for t in formal_names], name.span)
        if len({f.name for f in formals}) != len(formals):
            raise PlSyntaxError(f"repeated formal parameter in {name.text}", name.span)
        self.push(formals)
        body = self._sequence()
        self.pop()
        self._expect("end")
        closing = self._name()
        if closing.text != name.text:
            raise PlSyntaxError(f"'end {closing.text}' closes procedure {name.text}", closing.span)
        return ProcDef(proc, formals, body, span=self._span_from(start))

    def _call(self) -> Term:
        start = self._expect("call")
        name = self._name()
        actuals = [self.variable(t.text, t.span) for t in self._arguments()]
        return self.callee(name.text, actuals, self._span_from(start))

    def _cond(self) -> Term:
        start = self._expect("if")
        name = self._name()
        var = self.variable(name.text, name.span)
        self._expect("then")
        then = None if self._at("else") or self._at("fi") else self._sequence()
        orelse = None
        if self._accept("else"):
            orelse = None if self._at("fi") else self._sequence()
        self._expect("fi")
        try:
            return Cond(var, then, orelse, span=self._span_from(start))
        except IRError as e:
            raise PlSyntaxError(e.message, start.span) from e

    def _fix(self) -> Term:
        start = self._expect("fix")
        used_name = self._name()
        self._expect("as")
        defined_name = self._name()
        self._expect("in")
        defined = self.variable(defined_name.text, defined_name.span)
        if not defined.is_proc:
            raise KindError(f"fix needs a procedure variable, {defined.name} is data", defined_name.span)
        used = VarId(used_name.text, defined.kind)
        self.push([used])
        body = self._sequence()
        self.pop()
        self._expect("end")
        return Fix(used, defined, body, span=self._span_from(start))

    def _pad(self) -> Term:
        start = self._expect("pad")
        extra = tuple(self.variable(t.text, t.span) for t in self._names())
        self._expect("in")
        body = self._sequence()
        self._expect("end")
        return Pad(body, extra, span=self._span_from(start))

    def _frag(self) -> Term:
        start = self._expect("frag")
        name = self._name()
        actuals = [self.variable(t.text, t.span) for t in self._arguments()]
        return self.fragment(name.text, actuals, self._span_from(start))


def parse(text: str, sig_env: Optional[SigEnv] = None) -> Term:
    """Parse PL text into a term."""
    return Parser(text, sig_env or SigEnv()).parse()


def load_program(path: Union[str, Path], signatures: Union[str, Path, SigEnv, None] = None) -> Tuple[Term, SigEnv]:
    """Parse a ``.pl`` file; signatures default to the sidecar ``.sig`` file."""
    path = Path(path)
    if isinstance(signatures, SigEnv):
        env = signatures
    elif signatures is not None:
        env = SigEnv.load(signatures)
    elif path.with_suffix(".sig").exists():
        env = SigEnv.load(path.with_suffix(".sig"))
    else:
        env = SigEnv()
    term = parse(path.read_text(encoding="utf-8"), env)
    logger.info(f"Parsed {path}")
    return term, env


class _SexprReader(_Resolver):
    def _vars(self, items: SExpr) -> List[VarId]:
        if not isinstance(items, list):
            raise PlSyntaxError(f"expected a variable list, found {items}")
        return [self.variable(self._atom(item)) for item in items]

    @staticmethod
    def _atom(item: SExpr) -> str:
        if not isinstance(item, str) or isinstance(item, Quoted):
            raise PlSyntaxError(f"expected a name, found {item}")
        return item

    def term(self, expr: SExpr) -> Optional[Term]:
        if not isinstance(expr, list):
            raise PlSyntaxError(f"expected a term, found {expr}")
        if not expr:
            return None
        head, args = self._atom(expr[0]), expr[1:]
        try:
            return self._build(head, args)
        except (IndexError, ValueError) as e:
            raise PlSyntaxError(f"malformed ({head} ...): {e}") from e

    def _required(self, expr: SExpr) -> Term:
        term = self.term(expr)
        if term is None:
            raise PlSyntaxError("empty term where a program is required")
        return term

    def _build(self, head: str, args: List[SExpr]) -> Optional[Term]:
        if head == "seq":
            return Seq(self._required(args[0]), self._required(args[1]))
        if head == "cond":
            return Cond(self.variable(self._atom(args[0])), self.term(args[1]), self.term(args[2]))
        if head == "local":
            var = self.local_kind(self._atom(args[0]))
            self.push([var])
            body = self._required(args[1])
            self.pop()
            return Local(var, body)
        if head == "procdef":
            proc = self.variable(self._atom(args[0]))
            names = [self._atom(a) for a in args[1]] if isinstance(args[1], list) else []
            formals = self.formals(proc, names, None)
            self.push(formals)
            body = self._required(args[2])
            self.pop()
            return ProcDef(proc, formals, body)
        if head == "call":
            actuals = self._vars(args[1])
            call = self.callee(self._atom(args[0]), actuals, None)
            prefix = self.term(args[2]) if len(args) > 2 else None
            if prefix is None:
                return call
            if not isinstance(call, ProcCall):
                return Seq(prefix, call)
            return ProcCall(call.proc, call.actuals, prefix)
        if head == "fix":
            defined = self.variable(self._atom(args[1]))
            used = VarId(self._atom(args[0]), defined.kind)
            self.push([used])
            body = self._required(args[2])
            self.pop()
            return Fix(used, defined, body)
        if head == "frag":
            return self.fragment(self._atom(args[0]), self._vars(args[1]), None)
        if head == "prim":
            name = self._atom(args[0])
            entry = self.env.get(name)
            if entry is None or entry.role != "prim":
                raise UndeclaredIdentifier(f"undeclared primitive {name}")
            return self.prim(entry, self._vars(args[1]), None)
        if head == "pad":
            return Pad(self._required(args[1]), tuple(self._vars(args[0])))
        raise PlSyntaxError(f"unknown term form ({head} ...)")


def term_from_sexpr(expr: Union[str, SExpr], sig_env: Optional[SigEnv] = None) -> Term:
    """Build a term from its s-expression form (text or already read)."""
    if isinstance(expr, str) and not isinstance(expr, Quoted):
        expr = read_sexpr(expr)
    term = _SexprReader(sig_env or SigEnv()).term(expr)
    if term is None:
        raise PlSyntaxError("empty term")
    return term
