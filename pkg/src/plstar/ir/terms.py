"""
Abstract program terms.

Terms are immutable: every operation builds new nodes. Source spans ride
along for diagnostics but take no part in equality or hashing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, FrozenSet, Iterable, Iterator, Optional, Sequence, Tuple

from ..errors import IRError, PsiViolation
from .typesig import DataKind, Kind, ProcKind, Sort, TypeSig

if TYPE_CHECKING:
    from ..parser.lexer import SourceSpan


@dataclass(frozen=True)
class VarId:
    """A program variable: data of some sort, or a procedure with a signature."""

    name: str
    kind: Kind
    is_psi: bool = False

    @property
    def is_data(self) -> bool:
        return isinstance(self.kind, DataKind)

    @property
    def is_proc(self) -> bool:
        return isinstance(self.kind, ProcKind)

    @property
    def sort(self) -> Sort:
        if not isinstance(self.kind, DataKind):
            raise IRError(f"{self.name} is a procedure variable")
        return self.kind.sort

    @property
    def sig(self) -> TypeSig:
        if not isinstance(self.kind, ProcKind):
            raise IRError(f"{self.name} is a data variable")
        return self.kind.sig

    def renamed(self, name: str) -> "VarId":
        return VarId(name, self.kind, self.is_psi)

    def __str__(self) -> str:
        return self.name


PSI = VarId("psi", DataKind(Sort.UNIVERSAL), is_psi=True)


def var_order(var: VarId) -> Tuple[bool, str, str]:
    """Deterministic ordering key; ψ sorts last."""
    return (var.is_psi, var.name, str(var.kind))


def sorted_vars(vars_: Iterable[VarId]) -> list:
    return sorted(vars_, key=var_order)


def check_psi_last(vars_: Sequence[VarId]) -> None:
    positions = [i for i, v in enumerate(vars_) if v.is_psi]
    if len(positions) > 1 or (positions and positions[0] != len(vars_) - 1):
        raise PsiViolation("psi must appear once, as the last variable of a list")


@dataclass(frozen=True)
class EffectSummary:
    """Declared reads, writes and store effect of a leaf fragment."""

    reads: FrozenSet[VarId] = frozenset()
    writes: FrozenSet[VarId] = frozenset()
    psi_effect: Optional[str] = None


def effect_from_sig(sig: TypeSig, actuals: Sequence[VarId], psi_effect: Optional[str] = None) -> EffectSummary:
    """Derive an effect summary from a signature and the actual variables."""
    plain = [v for v in actuals if not v.is_psi]
    if len(plain) != sig.arity:
        raise IRError(f"expected {sig.arity} arguments, got {len(plain)}")
    reads = frozenset(v for v, arg in zip(plain, sig.args) if arg.io.reads)
    writes = frozenset(v for v, arg in zip(plain, sig.args) if arg.io.writes)
    return EffectSummary(reads, writes, psi_effect)


class Term:
    """Base class of all program terms."""

    span: Optional["SourceSpan"]


def _span() -> "Optional[SourceSpan]":
    return field(default=None, compare=False, repr=False, kw_only=True)  # type: ignore[return-value]


@dataclass(frozen=True)
class Fragment(Term):
    """A fragment variable X applied to program variables."""

    name: str
    vars: Tuple[VarId, ...]
    effect: EffectSummary = EffectSummary()
    span: Optional["SourceSpan"] = _span()

    def __post_init__(self) -> None:
        check_psi_last(self.vars)


@dataclass(frozen=True)
class Prim(Term):
    """A primitive leaf whose behaviour comes from the builtin registry."""

    name: str
    vars: Tuple[VarId, ...]
    effect: EffectSummary = EffectSummary()
    span: Optional["SourceSpan"] = _span()

    def __post_init__(self) -> None:
        check_psi_last(self.vars)
        if not self.effect.writes <= set(self.vars):
            raise IRError(f"primitive {self.name} writes variables it does not list")


@dataclass(frozen=True)
class Seq(Term):
    first: Term
    second: Term
    span: Optional["SourceSpan"] = _span()


@dataclass(frozen=True)
class Cond(Term):
    """``x ? P ? Q``: either branch may be empty, not both."""

    var: VarId
    then: Optional[Term]
    orelse: Optional[Term]
    span: Optional["SourceSpan"] = _span()

    def __post_init__(self) -> None:
        if self.then is None and self.orelse is None:
            raise IRError("conditional with two empty branches")


@dataclass(frozen=True)
class Local(Term):
    """``∃x P``: x is local to P."""

    var: VarId
    body: Term
    span: Optional["SourceSpan"] = _span()


@dataclass(frozen=True)
class ProcDef(Term):
    """``↑^p_y P``: defines procedure p with formals y."""

    proc: VarId
    formals: Tuple[VarId, ...]
    body: Term
    span: Optional["SourceSpan"] = _span()

    def __post_init__(self) -> None:
        if not self.proc.is_proc:
            raise IRError(f"{self.proc.name} is not a procedure variable")
        check_psi_last(self.formals)


@dataclass(frozen=True)
class ProcCall(Term):
    """``↓^p_y P``: runs P (possibly empty) then calls p on y."""

    proc: VarId
    actuals: Tuple[VarId, ...]
    prefix: Optional[Term] = None
    span: Optional["SourceSpan"] = _span()

    def __post_init__(self) -> None:
        check_psi_last(self.actuals)


@dataclass(frozen=True)
class Fix(Term):
    """``μ(u, v, P, ≥)``: identifies the used procedure u with the defined v."""

    used: VarId
    defined: VarId
    body: Term
    span: Optional["SourceSpan"] = _span()

    def __post_init__(self) -> None:
        if not (self.used.is_proc and self.defined.is_proc):
            raise IRError("fix requires two procedure variables")


@dataclass(frozen=True)
class Pad(Term):
    """``[x, y]P``: P with extra data variables listed but unused."""

    body: Term
    extra: Tuple[VarId, ...]
    span: Optional["SourceSpan"] = _span()


def seq(*terms: Optional[Term]) -> Optional[Term]:
    """Right-nested sequential composition, skipping empty parts."""
    parts = [t for t in terms if t is not None]
    if not parts:
        return None
    result = parts[-1]
    for term in reversed(parts[:-1]):
        result = Seq(term, result)
    return result


def children(term: Term) -> Tuple[Term, ...]:
    if isinstance(term, Seq):
        return (term.first, term.second)
    if isinstance(term, Cond):
        return tuple(t for t in (term.then, term.orelse) if t is not None)
    if isinstance(term, (Local, ProcDef, Fix, Pad)):
        return (term.body,)
    if isinstance(term, ProcCall) and term.prefix is not None:
        return (term.prefix,)
    return ()


def subterms(term: Term) -> Iterator[Term]:
    """Pre-order traversal."""
    stack = [term]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def is_fragment_free(term: Term) -> bool:
    return not any(isinstance(t, Fragment) for t in subterms(term))


def fragment_names(term: Term) -> FrozenSet[str]:
    return frozenset(t.name for t in subterms(term) if isinstance(t, Fragment))


def bound_vars(term: Term) -> FrozenSet[VarId]:
    """Variables bound by some Local, ProcDef formal list or Fix inside the term."""
    found: set = set()
    for node in subterms(term):
        if isinstance(node, Local):
            found.add(node.var)
        elif isinstance(node, ProcDef):
            found.update(node.formals)
        elif isinstance(node, Fix):
            found.add(node.used)
    return frozenset(found)


def occurring_vars(term: Term) -> FrozenSet[VarId]:
    """Every variable occurring anywhere in the term, bound or free."""
    found: set = set()
    for node in subterms(term):
        if isinstance(node, (Fragment, Prim)):
            found.update(node.vars)
        elif isinstance(node, Cond):
            found.add(node.var)
        elif isinstance(node, Local):
            found.add(node.var)
        elif isinstance(node, ProcDef):
            found.add(node.proc)
            found.update(node.formals)
        elif isinstance(node, ProcCall):
            found.add(node.proc)
            found.update(node.actuals)
        elif isinstance(node, Fix):
            found.update((node.used, node.defined))
        elif isinstance(node, Pad):
            found.update(node.extra)
    return frozenset(found)
