"""
Relations over tuples of semantic values, and the expression forms proofs build from them.

A relation is evaluated on one semantics per listed variable: a ``DataSem``
for data variables, a ``ProcSem`` for procedures, and the ψ pair last when
the relation is ψ-aware. Proof files write relation expressions as::

    R                          a library relation without parameters
    (R 2)  (R k)               a parameterised library relation
    (select R (2 3 5 1) 7)     R applied to positions 2, 3, 5, 1 of a 7-tuple
    (permuted R (2 1))         select with a permutation
    (with_equality R 1 2)      R plus "positions 1 and 2 agree"
    (exists_at R 3 int)        R with position 3 existentially quantified
    (proc_relation R 1)        R1(u, q) = for all v, q(v) implies R(u, v)
    (forall k 0 3 R)           R for every k in 0..3
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import product
from typing import Any, Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from ..errors import KindError, PlSyntaxError, UnknownRulePayload
from ..ir.sexpr import Quoted, SExpr, read_sexpr
from ..ir.typesig import DataKind, Sort, TypeSig
from ..interp.builtins import BUILTINS, BuiltinRegistry
from ..interp.enumeration import values_of_sort
from ..interp.evaluator import Machine
from ..interp.semantics import Args, Bottom, DataSem, Domain, Fuel, ProcSem
from ..interp.values import UNDEFINED

Param = Union[int, str]


class Inconclusive(Exception):
    """A relation needed a procedure call that ran out of fuel."""


class RelExpr:
    """Base class of relation expressions."""

    def arity(self, ctx: "RelContext") -> int:
        raise NotImplementedError

    def evaluate(self, sems: Sequence[Any], ctx: "RelContext") -> bool:
        raise NotImplementedError

    def depends_on(self, position: int, ctx: "RelContext") -> bool:
        return True


@dataclass(frozen=True)
class Relation(RelExpr):
    """An executable relation: ``predicate(ctx, *sems)``."""

    name: str
    params: Tuple[str, ...]
    predicate: Callable[..., bool] = field(compare=False, repr=False)
    psi_aware: bool = False
    args: Tuple[int, ...] = ()

    def arity(self, ctx: "RelContext") -> int:
        return len(self.params)

    def evaluate(self, sems: Sequence[Any], ctx: "RelContext") -> bool:
        return bool(self.predicate(ctx, *sems))

    def __str__(self) -> str:
        return f"({self.name} {' '.join(map(str, self.args))})" if self.args else self.name


@dataclass(frozen=True)
class Named(RelExpr):
    """A library relation by name; symbolic parameters resolve against the bindings."""

    name: str
    args: Tuple[Param, ...] = ()

    def arity(self, ctx: "RelContext") -> int:
        return ctx.resolve(self).arity(ctx)

    def evaluate(self, sems: Sequence[Any], ctx: "RelContext") -> bool:
        return ctx.resolve(self).evaluate(sems, ctx)

    def __str__(self) -> str:
        return f"({self.name} {' '.join(map(str, self.args))})" if self.args else self.name


@dataclass(frozen=True)
class Select(RelExpr):
    """``R(y_{σ(1)}, ..., y_{σ(m)})`` over an ``arity``-tuple y."""

    inner: RelExpr
    positions: Tuple[int, ...]
    size: int

    def arity(self, ctx: "RelContext") -> int:
        return self.size

    def evaluate(self, sems: Sequence[Any], ctx: "RelContext") -> bool:
        return self.inner.evaluate([sems[i - 1] for i in self.positions], ctx)

    def depends_on(self, position: int, ctx: "RelContext") -> bool:
        return any(p == position and self.inner.depends_on(i + 1, ctx) for i, p in enumerate(self.positions))

    def __str__(self) -> str:
        return f"(select {self.inner} ({' '.join(map(str, self.positions))}) {self.size})"


@dataclass(frozen=True)
class WithEquality(RelExpr):
    inner: RelExpr
    left: int
    right: int

    def arity(self, ctx: "RelContext") -> int:
        return self.inner.arity(ctx)

    def evaluate(self, sems: Sequence[Any], ctx: "RelContext") -> bool:
        return sems[self.left - 1] == sems[self.right - 1] and self.inner.evaluate(sems, ctx)

    def __str__(self) -> str:
        return f"(with_equality {self.inner} {self.left} {self.right})"


@dataclass(frozen=True)
class ExistsAt(RelExpr):
    """``∃x R(u, x, v)`` with x at ``position`` of the inner relation."""

    inner: RelExpr
    position: int
    sort: Sort = Sort.INT

    def arity(self, ctx: "RelContext") -> int:
        return self.inner.arity(ctx) - 1

    def evaluate(self, sems: Sequence[Any], ctx: "RelContext") -> bool:
        before, after = list(sems[: self.position - 1]), list(sems[self.position - 1 :])
        values = values_of_sort(self.sort, ctx.domain)
        for init, fin in product((UNDEFINED,) + values, values):
            if self.inner.evaluate(before + [DataSem(init, fin)] + after, ctx):
                return True
        return False

    def depends_on(self, position: int, ctx: "RelContext") -> bool:
        return self.inner.depends_on(position if position < self.position else position + 1, ctx)

    def __str__(self) -> str:
        return f"(exists_at {self.inner} {self.position} {self.sort.value})"


@dataclass(frozen=True)
class ProcRelation(RelExpr):
    """``R1(u, q) ≡ ∀v (q(v) ⊃ R(u, v))`` where u has ``inputs`` entries."""

    inner: RelExpr
    inputs: int

    def arity(self, ctx: "RelContext") -> int:
        return self.inputs + 1

    def evaluate(self, sems: Sequence[Any], ctx: "RelContext") -> bool:
        u, q = list(sems[: self.inputs]), sems[self.inputs]
        if not isinstance(q, ProcSem):
            raise KindError(f"proc_relation expects a procedure at position {self.inputs + 1}")
        for args in ctx.argument_space(q.sig):
            outputs = ctx.call(q, args)
            if outputs is None:
                continue
            v = [
                DataSem(a if arg.io.reads else UNDEFINED, o if arg.io.writes else a)
                for a, o, arg in zip(args, outputs, q.sig.args)
            ]
            if not self.inner.evaluate(u + v, ctx):
                return False
        return True

    def __str__(self) -> str:
        return f"(proc_relation {self.inner} {self.inputs})"


@dataclass(frozen=True)
class ForAll(RelExpr):
    var: str
    low: int
    high: int
    body: RelExpr

    def arity(self, ctx: "RelContext") -> int:
        return self.body.arity(ctx.bind(self.var, self.low))

    def evaluate(self, sems: Sequence[Any], ctx: "RelContext") -> bool:
        return all(self.body.evaluate(sems, ctx.bind(self.var, k)) for k in range(self.low, self.high + 1))

    def depends_on(self, position: int, ctx: "RelContext") -> bool:
        return self.body.depends_on(position, ctx.bind(self.var, self.low))

    def __str__(self) -> str:
        return f"(forall {self.var} {self.low} {self.high} {self.body})"


RelationFactory = Callable[..., Relation]
Library = Mapping[str, RelationFactory]


@dataclass
class RelContext:
    """Everything a relation needs besides its arguments.

    The call cache and the resolved-relation cache are shared by every
    context derived with ``bind``.
    """

    library: Library
    domain: Domain = Domain()
    fuel: Fuel = Fuel()
    registry: BuiltinRegistry = BUILTINS
    bindings: Mapping[str, int] = field(default_factory=dict)
    memo: Dict[Any, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.machine = Machine(self.fuel, self.registry, self.domain.int_range)

    def bind(self, name: str, value: int) -> "RelContext":
        bound = replace(self, bindings={**self.bindings, name: value})
        return bound

    def resolve(self, named: Named) -> Relation:
        args = tuple(self._param(a) for a in named.args)
        key = ("relation", named.name, args)
        if key not in self.memo:
            factory = self.library.get(named.name)
            if factory is None:
                raise UnknownRulePayload(f"unknown relation {named.name}")
            try:
                self.memo[key] = factory(*args)
            except TypeError as e:
                raise UnknownRulePayload(f"relation {named.name} does not take {len(args)} parameters") from e
        return self.memo[key]

    def _param(self, value: Param) -> int:
        if isinstance(value, int):
            return value
        if value not in self.bindings:
            raise UnknownRulePayload(f"relation parameter {value} is not bound by an enclosing quantifier")
        return self.bindings[value]

    def call(self, proc: ProcSem, args: Args) -> Optional[Args]:
        """Outputs of ``proc`` on ``args``; None for ⊥.

        Raises:
            Inconclusive: the call ran out of fuel
        """
        key = ("call", proc, args)
        if key not in self.memo:
            outcome = self.machine.call(proc, args)
            if isinstance(outcome, Bottom):
                if outcome.fuel_exhausted:
                    raise Inconclusive(f"{proc.name} ran out of fuel")
                self.memo[key] = None
            else:
                self.memo[key] = outcome[0]
        return self.memo[key]

    def argument_space(self, sig: TypeSig) -> Iterator[Args]:
        """Every argument tuple for a procedure with data parameters."""
        options: List[Tuple[Any, ...]] = []
        for arg in sig.args:
            if not isinstance(arg.kind, DataKind):
                raise KindError(f"cannot enumerate procedure arguments of {sig}")
            options.append(values_of_sort(arg.kind.sort, self.domain) if arg.io.reads else (None,))
        return iter(product(*options))


def _drop(expr: RelExpr, position: int, ctx: RelContext) -> RelExpr:
    """Remove an unreferenced position from a select-shaped expression."""
    if isinstance(expr, Select):
        return Select(expr.inner, tuple(p - 1 if p > position else p for p in expr.positions), expr.size - 1)
    if isinstance(expr, ForAll):
        return ForAll(expr.var, expr.low, expr.high, _drop(expr.body, position, ctx))
    return ExistsAt(expr, position)


def normalize(expr: RelExpr, ctx: RelContext) -> RelExpr:
    """Canonical form used to compare a conclusion against the relation a rule derives."""
    if isinstance(expr, Select):
        inner = normalize(expr.inner, ctx)
        positions = expr.positions
        if isinstance(inner, Select):
            positions = tuple(positions[i - 1] for i in inner.positions)
            inner = inner.inner
        if positions == tuple(range(1, expr.size + 1)) and inner.arity(ctx) == expr.size:
            return inner
        return Select(inner, positions, expr.size)
    if isinstance(expr, ExistsAt):
        inner = normalize(expr.inner, ctx)
        if isinstance(inner, (Select, ForAll)) and not inner.depends_on(expr.position, ctx):
            dropped = _drop(inner, expr.position, ctx)
            if not isinstance(dropped, ExistsAt):
                return normalize(dropped, ctx)
        return ExistsAt(inner, expr.position, expr.sort)
    if isinstance(expr, WithEquality):
        return WithEquality(normalize(expr.inner, ctx), expr.left, expr.right)
    if isinstance(expr, ProcRelation):
        return ProcRelation(normalize(expr.inner, ctx), expr.inputs)
    if isinstance(expr, ForAll):
        return ForAll(expr.var, expr.low, expr.high, normalize(expr.body, ctx))
    return expr


def _int(item: SExpr) -> int:
    try:
        return int(item)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise PlSyntaxError(f"expected an integer, found {item}") from None


def _ints(item: SExpr) -> Tuple[int, ...]:
    if not isinstance(item, list):
        raise PlSyntaxError(f"expected a list of positions, found {item}")
    return tuple(_int(i) for i in item)


def _param(item: SExpr) -> Param:
    if isinstance(item, list) or isinstance(item, Quoted):
        raise PlSyntaxError(f"expected a relation parameter, found {item}")
    return int(item) if item.lstrip("-").isdigit() else item


def relation_from_sexpr(expr: Union[str, SExpr]) -> RelExpr:
    """Read a relation expression from proof-file syntax."""
    if isinstance(expr, str) and not isinstance(expr, Quoted):
        if expr.startswith("("):
            expr = read_sexpr(expr)
        else:
            return Named(expr)
    if not isinstance(expr, list) or not expr or isinstance(expr[0], list):
        raise PlSyntaxError(f"malformed relation {expr}")
    head, args = str(expr[0]), expr[1:]
    try:
        if head == "select":
            return Select(relation_from_sexpr(args[0]), _ints(args[1]), _int(args[2]))
        if head == "permuted":
            positions = _ints(args[1])
            if sorted(positions) != list(range(1, len(positions) + 1)):
                raise PlSyntaxError(f"{positions} is not a permutation")
            return Select(relation_from_sexpr(args[0]), positions, len(positions))
        if head == "with_equality":
            return WithEquality(relation_from_sexpr(args[0]), _int(args[1]), _int(args[2]))
        if head == "exists_at":
            sort = Sort(str(args[2])) if len(args) > 2 else Sort.INT
            return ExistsAt(relation_from_sexpr(args[0]), _int(args[1]), sort)
        if head == "proc_relation":
            return ProcRelation(relation_from_sexpr(args[0]), _int(args[1]))
        if head == "forall":
            return ForAll(str(args[0]), _int(args[1]), _int(args[2]), relation_from_sexpr(args[3]))
    except IndexError:
        raise PlSyntaxError(f"too few arguments in ({head} ...)") from None
    return Named(head, tuple(_param(a) for a in args))


def data(sem: Any) -> DataSem:
    if not isinstance(sem, DataSem):
        raise KindError(f"expected a data variable semantics, got {sem!r}")
    return sem
