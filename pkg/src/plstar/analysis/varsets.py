"""
Input, output and data-variable sets of terms, computed structurally.

Conventions:
    * ``outputs`` are the variables a term may define.
    * ``inputs`` are the free variables it uses without defining; inputs and
      outputs are disjoint and together give the free variables.
    * ``updates`` are outputs whose initial value is still observed, such as
      ``inout`` arguments or a variable written in only one branch.
    * ``data`` adds data variables listed by ``pad`` but not free.
ψ never appears in any set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Optional, Sequence, Tuple

from ..errors import UnknownVariable
from ..ir.terms import Cond, Fix, Fragment, Local, Pad, Prim, ProcCall, ProcDef, Seq, Term, VarId, subterms
from ..ir.typesig import DataKind, ProcKind

EMPTY: FrozenSet[VarId] = frozenset()


@dataclass(frozen=True)
class VarSets:
    inputs: FrozenSet[VarId] = EMPTY
    outputs: FrozenSet[VarId] = EMPTY
    updates: FrozenSet[VarId] = EMPTY
    padded: FrozenSet[VarId] = EMPTY

    @property
    def free(self) -> FrozenSet[VarId]:
        return self.inputs | self.outputs

    @property
    def data(self) -> FrozenSet[VarId]:
        return frozenset(v for v in self.free if v.is_data) | self.padded

    @property
    def procs(self) -> FrozenSet[VarId]:
        return frozenset(v for v in self.free if v.is_proc)

    @property
    def significant(self) -> FrozenSet[VarId]:
        """Data variables whose initial value can influence the result."""
        return self.data - (self.outputs - self.updates)

    def without(self, vars_: Sequence[VarId]) -> "VarSets":
        drop = frozenset(vars_)
        return VarSets(self.inputs - drop, self.outputs - drop, self.updates - drop, self.padded - drop)


def _leaf(vars_: Sequence[VarId], reads: FrozenSet[VarId], writes: FrozenSet[VarId]) -> VarSets:
    listed = frozenset(v for v in vars_ if not v.is_psi)
    outputs = frozenset(writes) & listed
    return VarSets(listed - outputs, outputs, frozenset(reads) & outputs)


def call_sets(call: ProcCall) -> VarSets:
    """Sets of the bare call ``↓^p_y``; argument directions come from p's signature."""
    sig = call.proc.sig
    reads = set()
    writes = set()
    for actual, arg in zip(call.actuals, sig.args):
        if actual.is_psi:
            continue
        if arg.io.reads:
            reads.add(actual)
        if arg.io.writes:
            writes.add(actual)
    # arguments beyond the signature are read
    reads.update(v for v in call.actuals[sig.arity :] if not v.is_psi)
    reads.add(call.proc)
    outputs = frozenset(writes)
    return VarSets(frozenset(reads) - outputs, outputs, frozenset(reads) & outputs)


def _sequence(first: VarSets, second: VarSets) -> VarSets:
    outputs = first.outputs | second.outputs
    inputs = (first.inputs | second.inputs) - outputs
    updates = first.updates | (second.updates - first.outputs) | (first.inputs & second.outputs)
    return VarSets(inputs, outputs, updates, first.padded | second.padded)


@lru_cache(maxsize=4096)
def var_sets(term: Optional[Term]) -> VarSets:
    """Compute the variable sets of a term (empty term: all sets empty)."""
    if term is None:
        return VarSets()
    if isinstance(term, (Prim, Fragment)):
        return _leaf(term.vars, term.effect.reads, term.effect.writes)
    if isinstance(term, Seq):
        return _sequence(var_sets(term.first), var_sets(term.second))
    if isinstance(term, Cond):
        then, orelse = var_sets(term.then), var_sets(term.orelse)
        outputs = then.outputs | orelse.outputs
        inputs = ({term.var} | then.inputs | orelse.inputs) - outputs
        one_sided = frozenset(v for v in then.outputs ^ orelse.outputs if v.is_data)
        updates = (
            then.updates
            | orelse.updates
            | one_sided
            | (({term.var} | then.inputs | orelse.inputs) & outputs)
        )
        return VarSets(inputs, outputs, updates, then.padded | orelse.padded)
    if isinstance(term, Local):
        return var_sets(term.body).without([term.var])
    if isinstance(term, ProcDef):
        body = var_sets(term.body).without(term.formals)
        outputs = body.outputs | {term.proc}
        return VarSets(body.inputs - outputs, outputs, body.updates - {term.proc}, body.padded)
    if isinstance(term, ProcCall):
        bare = call_sets(ProcCall(term.proc, term.actuals))
        if term.prefix is None:
            return bare
        return _sequence(var_sets(term.prefix), bare)
    if isinstance(term, Fix):
        body = var_sets(term.body)
        return VarSets(body.inputs - {term.used}, body.outputs, body.updates - {term.used}, body.padded)
    if isinstance(term, Pad):
        body = var_sets(term.body)
        return VarSets(body.inputs, body.outputs, body.updates, body.padded | frozenset(term.extra))
    raise TypeError(f"not a term: {term!r}")


def _find(term: Term, name: str) -> Optional[VarId]:
    for node in subterms(term):
        candidates: Tuple[VarId, ...] = ()
        if isinstance(node, (Prim, Fragment)):
            candidates = node.vars
        elif isinstance(node, Cond):
            candidates = (node.var,)
        elif isinstance(node, Local):
            candidates = (node.var,)
        elif isinstance(node, ProcDef):
            candidates = (node.proc, *node.formals)
        elif isinstance(node, ProcCall):
            candidates = (node.proc, *node.actuals)
        elif isinstance(node, Fix):
            candidates = (node.used, node.defined)
        elif isinstance(node, Pad):
            candidates = node.extra
        for var in candidates:
            if var.name == name:
                return var
    return None


def _definition(term: Term, proc: VarId) -> Optional[ProcDef]:
    for node in subterms(term):
        if isinstance(node, ProcDef) and node.proc == proc:
            return node
    return None


def _binding_scope(term: Term, var: VarId) -> Optional[Term]:
    """Body of the first binder of ``var`` inside ``term``."""
    for node in subterms(term):
        if isinstance(node, ProcDef) and var in node.formals:
            return node.body
        if isinstance(node, (Local, Fix)) and var in ((node.var,) if isinstance(node, Local) else (node.used,)):
            return node.body
    return None


def type_of(x: VarId | str, term: Term, alpha: Sequence[int] = ()) -> Tuple[bool, bool, bool, bool]:
    """Answer the (in, out, data, proc) query for x, or for its argument at ``alpha``.

    With an empty ``alpha`` the flags describe x itself in ``term``. Otherwise
    they describe the argument at the 1-based index path: derived from the
    defining procedure body when ``term`` defines x, else from x's signature.
    """
    var = _find(term, x) if isinstance(x, str) else x
    if var is None or (not isinstance(x, str) and _find(term, var.name) is None):
        raise UnknownVariable(f"{x if isinstance(x, str) else x.name} does not occur in the term")
    is_data = isinstance(var.kind, DataKind)
    if not alpha:
        sets = var_sets(term)
        if var not in sets.free:
            scope = _binding_scope(term, var)
            if scope is not None:
                sets = var_sets(scope)
        return (var in sets.inputs or var in sets.updates, var in sets.outputs, is_data, not is_data)
    if not isinstance(var.kind, ProcKind):
        raise UnknownVariable(f"{var.name} is a data variable and has no arguments")
    definition = _definition(term, var)
    if definition is None or alpha[0] > len(definition.formals) or alpha[0] < 1:
        return var.sig.flags(alpha)
    formal = definition.formals[alpha[0] - 1]
    if len(alpha) == 1:
        body = var_sets(definition.body)
        formal_data = formal.is_data
        return (
            formal in body.inputs or formal in body.updates,
            formal in body.outputs,
            formal_data,
            not formal_data,
        )
    return type_of(formal, definition.body, alpha[1:]) if _find(definition.body, formal.name) else var.sig.flags(alpha)
