"""
Operator preconditions, variable padding and substitution legality.
"""

from __future__ import annotations

from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Set

from loguru import logger

from ..errors import VarAlreadyPresent
from ..ir.substitution import Substitution, free_vars
from ..ir.terms import Cond, Fix, Fragment, Local, Pad, Prim, ProcCall, ProcDef, Seq, Term, VarId, children, subterms
from .diagnostics import Diagnostic, DiagnosticCode, sort_diagnostics
from .varsets import call_sets, var_sets


def _names(vars_: Iterable[VarId]) -> tuple:
    return tuple(sorted(v.name for v in vars_))


class PreconditionChecker:
    """Walks a term and records every operator precondition it violates.

    Data sets across ``;`` must agree up to the variables in scope: those
    listed for the whole term, the formals and locals of enclosing
    definitions, and explicitly padded ones. With ``implicit_padding`` every
    mismatch counts as repaired by the new variable axiom.
    """

    def __init__(self, implicit_padding: bool = False):
        self.implicit_padding = implicit_padding
        self.diagnostics: List[Diagnostic] = []
        self._defined: Dict[VarId, ProcDef] = {}
        self._definitions: Dict[VarId, ProcDef] = {}

    def report(self, code: DiagnosticCode, message: str, node: Term, related: Iterable[VarId] = ()) -> None:
        self.diagnostics.append(Diagnostic(code, message, node.span, _names(related)))

    def run(self, term: Term, listed: Iterable[VarId] = ()) -> List[Diagnostic]:
        for node in subterms(term):
            if isinstance(node, ProcDef):
                self._definitions.setdefault(node.proc, node)
        for node in subterms(term):
            if isinstance(node, Fix) and node.defined in self._definitions:
                self._definitions.setdefault(node.used, self._definitions[node.defined])
        self._walk(term, frozenset(v for v in listed if v.is_data))
        _UseBeforeDef(self).scan(term, frozenset())
        return sort_diagnostics(self.diagnostics)

    def _walk(self, node: Term, scope: FrozenSet[VarId]) -> None:
        self._visit(node, scope)
        if isinstance(node, Local):
            scope = scope | {node.var}
        elif isinstance(node, ProcDef):
            scope = scope | frozenset(node.formals)
        elif isinstance(node, Pad):
            scope = scope | frozenset(node.extra)
        for child in children(node):
            self._walk(child, scope)

    def _visit(self, node: Term, scope: FrozenSet[VarId]) -> None:
        if isinstance(node, Seq):
            self._composition(node.first, node.second, node, scope)
        elif isinstance(node, Cond):
            if not node.var.is_data:
                self.report(DiagnosticCode.SCRUTINEE_NOT_DATA, f"condition {node.var.name} is a procedure", node, [node.var])
        elif isinstance(node, ProcDef):
            self._procdef(node)
        elif isinstance(node, ProcCall):
            self._call(node, scope)
        elif isinstance(node, Fix):
            self._fix(node)

    def _composition(self, first: Term, second: Term, node: Term, scope: FrozenSet[VarId]) -> None:
        left, right = var_sets(first), var_sets(second)
        shared = frozenset(v for v in left.outputs & right.outputs if v.is_proc)
        if shared:
            names = ", ".join(_names(shared))
            self.report(DiagnosticCode.SHARED_PROC_OUTPUT, f"procedure defined on both sides of ';': {names}", node, shared)
        diff = (left.data ^ right.data) - scope
        if diff and not self.implicit_padding:
            names = ", ".join(_names(diff))
            self.report(DiagnosticCode.DATA_SET_MISMATCH, f"data sets differ across ';' (pad {names})", node, diff)

    def _psi_effects(self, body: Term) -> List[str]:
        """Names of ψ-effecting leaves reachable from ``body``, through calls to defined procedures."""
        found: Set[str] = set()
        seen: Set[VarId] = set()
        pending = [body]
        while pending:
            for t in subterms(pending.pop()):
                if isinstance(t, (Prim, Fragment)) and t.effect.psi_effect:
                    found.add(t.name)
                elif isinstance(t, ProcCall) and t.proc in self._definitions and t.proc not in seen:
                    seen.add(t.proc)
                    pending.append(self._definitions[t.proc].body)
        return sorted(found)

    def _procdef(self, node: ProcDef) -> None:
        if node.proc in self._defined:
            self.report(DiagnosticCode.PROC_REDEFINED, f"procedure {node.proc.name} is defined twice", node, [node.proc])
        else:
            self._defined[node.proc] = node
        seen: Set[str] = set()
        for formal in node.formals:
            if formal.name in seen:
                self.report(DiagnosticCode.DUPLICATE_FORMAL, f"{formal.name} repeated in {node.proc.name}", node, [formal])
            seen.add(formal.name)
        body = var_sets(node.body)
        formals = frozenset(node.formals)
        outer_outputs = body.outputs - formals - {node.proc}
        if outer_outputs:
            names = ", ".join(_names(outer_outputs))
            self.report(
                DiagnosticCode.FORMAL_IS_OUTER_OUTPUT,
                f"{node.proc.name} defines non-parameters {names}",
                node,
                outer_outputs,
            )
        captured = frozenset(v for v in body.inputs - formals if v.is_data)
        effects = self._psi_effects(node.body)
        if captured and effects:
            self.report(
                DiagnosticCode.SIDE_EFFECT_ON_CAPTURED_VAR,
                f"{node.proc.name} captures {', '.join(_names(captured))} and runs side effects ({', '.join(effects)})",
                node,
                captured,
            )
        if len(node.formals) == node.proc.sig.arity:
            for formal, arg in zip(node.formals, node.proc.sig.args):
                reads = formal in body.inputs or formal in body.updates
                writes = formal in body.outputs
                if writes != arg.io.writes or (reads and not arg.io.reads) or formal.kind != arg.kind:
                    self.report(
                        DiagnosticCode.SIG_MISMATCH,
                        f"parameter {formal.name} of {node.proc.name} is used against its declared '{arg}'",
                        node,
                        [formal],
                    )
        else:
            self.report(
                DiagnosticCode.ARITY_MISMATCH,
                f"{node.proc.name} declares {node.proc.sig.arity} parameters, defines {len(node.formals)}",
                node,
                [node.proc],
            )

    def _call(self, node: ProcCall, scope: FrozenSet[VarId]) -> None:
        if not node.proc.is_proc:
            return
        sig = node.proc.sig
        actuals = [a for a in node.actuals if not a.is_psi]
        if len(actuals) != sig.arity:
            self.report(
                DiagnosticCode.ARITY_MISMATCH,
                f"{node.proc.name} takes {sig.arity} arguments, called with {len(actuals)}",
                node,
                [node.proc],
            )
            return
        for actual, arg in zip(actuals, sig.args):
            if actual.kind != arg.kind:
                self.report(
                    DiagnosticCode.SIG_MISMATCH,
                    f"argument {actual.name} of {node.proc.name} should be {arg.kind}",
                    node,
                    [actual],
                )
        written = [a for a, arg in zip(actuals, sig.args) if arg.io.writes]
        for a, b in combinations(range(len(actuals)), 2):
            if actuals[a] == actuals[b] and (actuals[a] in written):
                self.report(
                    DiagnosticCode.ALIASED_OUTPUTS,
                    f"{actuals[a].name} is passed twice to {node.proc.name} and written",
                    node,
                    [actuals[a]],
                )
                break
        if node.prefix is not None:
            self._composition(node.prefix, ProcCall(node.proc, node.actuals), node, scope)

    def _fix(self, node: Fix) -> None:
        body = var_sets(node.body)
        problems = []
        if node.used not in body.inputs:
            problems.append(f"{node.used.name} is not an input of the body")
        if node.defined not in body.outputs:
            problems.append(f"{node.defined.name} is not defined by the body")
        if node.used.kind != node.defined.kind:
            problems.append("signatures differ")
        if problems:
            self.report(DiagnosticCode.FIX_VAR_KIND, "fix " + "; ".join(problems), node, [node.used, node.defined])


class _UseBeforeDef:
    """Forward scan for local data read before it is written."""

    def __init__(self, checker: PreconditionChecker):
        self.checker = checker

    def _read(self, vars_: Iterable[VarId], undefined: FrozenSet[VarId], node: Term) -> None:
        for var in vars_:
            if var in undefined:
                self.checker.report(
                    DiagnosticCode.DATA_USE_BEFORE_DEF,
                    f"{var.name} is read before it is assigned",
                    node,
                    [var],
                )

    def scan(self, term: Optional[Term], undefined: FrozenSet[VarId]) -> FrozenSet[VarId]:
        """Return the set of still-undefined variables after ``term``."""
        if term is None:
            return undefined
        if isinstance(term, (Prim, Fragment)):
            self._read(sorted(term.effect.reads, key=lambda v: v.name), undefined, term)
            return undefined - term.effect.writes
        if isinstance(term, Seq):
            return self.scan(term.second, self.scan(term.first, undefined))
        if isinstance(term, Cond):
            self._read([term.var], undefined, term)
            return self.scan(term.then, undefined) | self.scan(term.orelse, undefined)
        if isinstance(term, Local):
            after = self.scan(term.body, undefined | {term.var} if term.var.is_data else undefined)
            return (after - {term.var}) | (undefined & {term.var})
        if isinstance(term, ProcDef):
            pending = frozenset(
                f
                for f, arg in zip(term.formals, term.proc.sig.args)
                if f.is_data and arg.io.writes and not arg.io.reads
            )
            self.scan(term.body, (undefined - frozenset(term.formals)) | pending)
            return undefined
        if isinstance(term, ProcCall):
            undefined = self.scan(term.prefix, undefined)
            bare = call_sets(ProcCall(term.proc, term.actuals))
            self._read(sorted(bare.inputs | bare.updates, key=lambda v: v.name), undefined, term)
            return undefined - bare.outputs
        if isinstance(term, (Fix, Pad)):
            return self.scan(term.body, undefined)
        raise TypeError(f"not a term: {term!r}")


def check_preconditions(term: Term, implicit_padding: bool = False, listed: Iterable[VarId] = ()) -> List[Diagnostic]:
    """Diagnostics for every operator precondition the term violates, by position.

    ``listed`` are the variables the term is considered over, as in ``[x]P``;
    data sets may differ on them across ``;``.
    """
    diagnostics = PreconditionChecker(implicit_padding).run(term, listed)
    logger.debug(f"Precondition check found {len(diagnostics)} diagnostics")
    return diagnostics


def pad_variables(term: Term, extra: Iterable[VarId]) -> Term:
    """List extra data variables on ``term`` without using them."""
    extra = sorted(set(extra), key=lambda v: v.name)
    if not extra:
        return term
    present = free_vars(term) | (frozenset(term.extra) if isinstance(term, Pad) else frozenset())
    for var in extra:
        if not var.is_data or var.is_psi:
            raise VarAlreadyPresent(f"only data variables can be padded, not {var.name}")
        if var in present:
            raise VarAlreadyPresent(f"{var.name} already occurs in the term")
    if isinstance(term, Pad):
        return Pad(term.body, tuple(term.extra) + tuple(extra), span=term.span)
    return Pad(term, tuple(extra), span=term.span)


def check_subst(term: Term, theta: Substitution) -> List[Diagnostic]:
    """Legality of Θ on P: kinds kept, ψ fixed, outputs and data never merged."""
    diagnostics: List[Diagnostic] = []
    for source, target in theta.items():
        if source.is_psi or target.is_psi:
            diagnostics.append(
                Diagnostic(DiagnosticCode.PSI_VIOLATION, f"substitution moves psi ({source.name} -> {target.name})", term.span)
            )
        elif source.kind != target.kind:
            diagnostics.append(
                Diagnostic(
                    DiagnosticCode.KIND_MISMATCH,
                    f"{source.name} ({source.kind}) mapped to {target.name} ({target.kind})",
                    term.span,
                    (source.name, target.name),
                )
            )
    sets = var_sets(term)
    for x, y in combinations(sorted(sets.outputs, key=lambda v: v.name), 2):
        if theta(x) == theta(y):
            diagnostics.append(
                Diagnostic(
                    DiagnosticCode.NOT_OUTPUT_INJECTIVE,
                    f"outputs {x.name} and {y.name} both map to {theta(x).name}",
                    term.span,
                    (x.name, y.name),
                )
            )
    for x, y in combinations(sorted(sets.data, key=lambda v: v.name), 2):
        if theta(x) == theta(y):
            diagnostics.append(
                Diagnostic(
                    DiagnosticCode.DATA_IDENTIFIED,
                    f"data variables {x.name} and {y.name} both map to {theta(x).name}",
                    term.span,
                    (x.name, y.name),
                )
            )
    return sort_diagnostics(diagnostics)
