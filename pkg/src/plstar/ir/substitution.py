"""
Variable substitutions, capture-avoiding application and fragment instantiation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from loguru import logger

from ..errors import KindMismatch, PsiViolation, UnboundFragment, UnknownVariable, VarArityMismatch
from .terms import (
    PSI,
    Cond,
    EffectSummary,
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
    occurring_vars,
)


class Substitution:
    """A map from variables to variables, identity off its domain."""

    def __init__(self, mapping: Optional[Mapping[VarId, VarId]] = None):
        self._map: Dict[VarId, VarId] = {k: v for k, v in (mapping or {}).items() if k != v}

    @classmethod
    def identity(cls) -> "Substitution":
        return cls()

    @classmethod
    def from_names(cls, pairs: Mapping[str, str], universe: Iterable[VarId]) -> "Substitution":
        """Build a substitution from names, resolving kinds against ``universe``.

        Raises:
            UnknownVariable: a source name is not in ``universe``
        """
        by_name = {v.name: v for v in universe}
        mapping = {}
        for src, dst in pairs.items():
            source = by_name.get(src)
            if source is None:
                raise UnknownVariable(f"cannot substitute for {src}: not a variable of the term")
            target = by_name.get(dst, source.renamed(dst))
            mapping[source] = target
        return cls(mapping)

    def __call__(self, var: VarId) -> VarId:
        return self._map.get(var, var)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Substitution) and self._map == other._map

    def __hash__(self) -> int:
        return hash(frozenset(self._map.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{k.name}->{v.name}" for k, v in sorted(self._map.items(), key=lambda kv: kv[0].name))
        return f"Substitution({{{body}}})"

    def items(self) -> List[Tuple[VarId, VarId]]:
        return list(self._map.items())

    @property
    def domain(self) -> FrozenSet[VarId]:
        return frozenset(self._map)

    def image_of(self, vars_: Iterable[VarId]) -> FrozenSet[VarId]:
        return frozenset(self(v) for v in vars_)

    def without(self, vars_: Iterable[VarId]) -> "Substitution":
        drop = set(vars_)
        return Substitution({k: v for k, v in self._map.items() if k not in drop})

    def extended(self, source: VarId, target: VarId) -> "Substitution":
        mapping = dict(self._map)
        mapping[source] = target
        return Substitution(mapping)

    def then(self, other: "Substitution") -> "Substitution":
        """Composition: apply self first, then other."""
        mapping = {k: other(v) for k, v in self._map.items()}
        for k, v in other._map.items():
            mapping.setdefault(k, v)
        return Substitution(mapping)

    def is_injective_on(self, vars_: Iterable[VarId]) -> bool:
        pool = list(vars_)
        return len({self(v) for v in pool}) == len(set(pool))

    def is_renaming(self) -> bool:
        """One-to-one on every variable: a permutation of its domain."""
        targets = list(self._map.values())
        return len(set(targets)) == len(targets) and set(targets) <= set(self._map)

    def validate(self) -> None:
        """Raise if the substitution moves ψ or changes a variable's kind."""
        for source, target in self._map.items():
            if source.is_psi or target.is_psi:
                raise PsiViolation(f"substitution moves psi ({source.name} -> {target.name})")
            if source.kind != target.kind:
                raise KindMismatch(f"{source.name}: {source.kind} cannot map to {target.name}: {target.kind}")


def fresh_var(base: VarId, avoid: Iterable[Union[VarId, str]]) -> VarId:
    """Return base, or base renamed with the smallest numeric suffix not in avoid."""
    names = {a if isinstance(a, str) else a.name for a in avoid}
    if base.name not in names:
        return base
    suffix = 1
    while f"{base.name}{suffix}" in names:
        suffix += 1
    return base.renamed(f"{base.name}{suffix}")


def free_vars(term: Optional[Term]) -> FrozenSet[VarId]:
    """Syntactically free variables (ψ excluded)."""
    if term is None:
        return frozenset()
    if isinstance(term, (Fragment, Prim)):
        found = set(term.vars)
    elif isinstance(term, Seq):
        found = set(free_vars(term.first) | free_vars(term.second))
    elif isinstance(term, Cond):
        found = {term.var} | free_vars(term.then) | free_vars(term.orelse)
    elif isinstance(term, Local):
        found = set(free_vars(term.body) - {term.var})
    elif isinstance(term, ProcDef):
        found = set(free_vars(term.body) - set(term.formals)) | {term.proc}
    elif isinstance(term, ProcCall):
        found = {term.proc, *term.actuals} | free_vars(term.prefix)
    elif isinstance(term, Fix):
        found = set(free_vars(term.body) - {term.used}) | {term.defined}
    elif isinstance(term, Pad):
        found = set(free_vars(term.body)) | set(term.extra)
    else:
        raise TypeError(f"not a term: {term!r}")
    found.discard(PSI)
    return frozenset(found)


def apply_subst(term: Term, theta: Substitution) -> Term:
    """Return PΘ: free occurrences replaced, binders renamed when they would capture."""
    theta.validate()
    result = _apply(term, theta)
    assert result is not None
    return result


def _bind(binders: Sequence[VarId], body: Term, theta: Substitution) -> Tuple[Tuple[VarId, ...], Substitution]:
    inner = theta.without(binders)
    body_free = free_vars(body) - set(binders)
    image_names = {inner(z).name for z in body_free}
    taken = {v.name for v in occurring_vars(body)} | image_names | {z.name for z in body_free}
    renamed: List[VarId] = []
    for binder in binders:
        if binder.name in image_names:
            fresh = fresh_var(binder, taken | {b.name for b in binders} | {r.name for r in renamed})
            logger.debug(f"renaming bound {binder.name} to {fresh.name} to avoid capture")
            inner = inner.extended(binder, fresh)
            taken.add(fresh.name)
            renamed.append(fresh)
        else:
            renamed.append(binder)
    return tuple(renamed), inner


def _map_effect(effect: EffectSummary, theta: Substitution) -> EffectSummary:
    return EffectSummary(theta.image_of(effect.reads), theta.image_of(effect.writes), effect.psi_effect)


def _apply(term: Optional[Term], theta: Substitution) -> Optional[Term]:
    if term is None:
        return None
    if isinstance(term, Fragment):
        return Fragment(term.name, tuple(theta(v) for v in term.vars), _map_effect(term.effect, theta), span=term.span)
    if isinstance(term, Prim):
        return Prim(term.name, tuple(theta(v) for v in term.vars), _map_effect(term.effect, theta), span=term.span)
    if isinstance(term, Seq):
        first = _apply(term.first, theta)
        second = _apply(term.second, theta)
        assert first is not None and second is not None
        return Seq(first, second, span=term.span)
    if isinstance(term, Cond):
        return Cond(theta(term.var), _apply(term.then, theta), _apply(term.orelse, theta), span=term.span)
    if isinstance(term, Local):
        (var,), inner = _bind((term.var,), term.body, theta)
        body = _apply(term.body, inner)
        assert body is not None
        return Local(var, body, span=term.span)
    if isinstance(term, ProcDef):
        formals, inner = _bind(term.formals, term.body, theta)
        body = _apply(term.body, inner)
        assert body is not None
        return ProcDef(theta(term.proc), formals, body, span=term.span)
    if isinstance(term, ProcCall):
        return ProcCall(theta(term.proc), tuple(theta(v) for v in term.actuals), _apply(term.prefix, theta), span=term.span)
    if isinstance(term, Fix):
        (used,), inner = _bind((term.used,), term.body, theta)
        body = _apply(term.body, inner)
        assert body is not None
        return Fix(used, theta(term.defined), body, span=term.span)
    if isinstance(term, Pad):
        body = _apply(term.body, theta)
        assert body is not None
        return Pad(body, tuple(theta(v) for v in term.extra), span=term.span)
    raise TypeError(f"not a term: {term!r}")


@dataclass(frozen=True)
class FragmentBinding:
    """A fragment definition: parameters and the body they scope over."""

    params: Tuple[VarId, ...]
    body: Term


def instantiate(term: Term, bindings: Mapping[str, Union[FragmentBinding, Term]]) -> Term:
    """Replace every fragment variable by its binding, renaming parameters positionally."""
    result = _instantiate(term, bindings)
    assert result is not None
    return result


def _bind_fragment(node: Fragment, binding: Union[FragmentBinding, Term]) -> Term:
    if isinstance(binding, FragmentBinding):
        params, body = binding.params, binding.body
    else:
        params, body = node.vars, binding
    if len(params) != len(node.vars):
        raise VarArityMismatch(f"fragment {node.name} has {len(node.vars)} variables, binding takes {len(params)}", node.span)
    stray = free_vars(body) - set(params)
    if stray:
        names = ", ".join(sorted(v.name for v in stray))
        raise VarArityMismatch(f"binding for {node.name} has free variables outside its parameters: {names}", node.span)
    mapping: Dict[VarId, VarId] = {}
    for param, actual in zip(params, node.vars):
        if param.is_psi or actual.is_psi:
            if param.is_psi != actual.is_psi:
                raise VarArityMismatch(f"psi position mismatch in fragment {node.name}", node.span)
            continue
        if param.kind != actual.kind:
            raise KindMismatch(f"fragment {node.name}: {param.name} and {actual.name} differ in kind", node.span)
        mapping[param] = actual
    return apply_subst(body, Substitution(mapping))


def _instantiate(term: Optional[Term], bindings: Mapping[str, Union[FragmentBinding, Term]]) -> Optional[Term]:
    if term is None:
        return None
    if isinstance(term, Fragment):
        if term.name not in bindings:
            raise UnboundFragment(f"fragment variable {term.name} is not bound", term.span)
        return _bind_fragment(term, bindings[term.name])
    if isinstance(term, Prim):
        return term
    if isinstance(term, Seq):
        first = _instantiate(term.first, bindings)
        second = _instantiate(term.second, bindings)
        assert first is not None and second is not None
        return Seq(first, second, span=term.span)
    if isinstance(term, Cond):
        return Cond(term.var, _instantiate(term.then, bindings), _instantiate(term.orelse, bindings), span=term.span)
    if isinstance(term, Local):
        return Local(term.var, _instantiate(term.body, bindings), span=term.span)  # type: ignore[arg-type]
    if isinstance(term, ProcDef):
        return ProcDef(term.proc, term.formals, _instantiate(term.body, bindings), span=term.span)  # type: ignore[arg-type]
    if isinstance(term, ProcCall):
        return ProcCall(term.proc, term.actuals, _instantiate(term.prefix, bindings), span=term.span)
    if isinstance(term, Fix):
        return Fix(term.used, term.defined, _instantiate(term.body, bindings), span=term.span)  # type: ignore[arg-type]
    if isinstance(term, Pad):
        return Pad(_instantiate(term.body, bindings), term.extra, span=term.span)  # type: ignore[arg-type]
    raise TypeError(f"not a term: {term!r}")


def canonical(term: Term) -> Term:
    """Canonical representative up to bound-name choice.

    Binders are renamed to ``%0, %1, …`` in pre-order, and calls carrying a
    prefix are expanded to ``P; call p(y)``.
    """
    counter = [0]

    def fresh(var: VarId) -> VarId:
        name = f"%{counter[0]}"
        counter[0] += 1
        return var.renamed(name)

    def walk(node: Optional[Term], theta: Substitution) -> Optional[Term]:
        if node is None:
            return None
        if isinstance(node, (Fragment, Prim)):
            return _apply(node, theta)
        if isinstance(node, Seq):
            return Seq(walk(node.first, theta), walk(node.second, theta))  # type: ignore[arg-type]
        if isinstance(node, Cond):
            return Cond(theta(node.var), walk(node.then, theta), walk(node.orelse, theta))
        if isinstance(node, Local):
            new = fresh(node.var)
            return Local(new, walk(node.body, theta.extended(node.var, new)))  # type: ignore[arg-type]
        if isinstance(node, ProcDef):
            inner = theta
            formals = []
            for formal in node.formals:
                new = fresh(formal)
                inner = inner.extended(formal, new)
                formals.append(new)
            return ProcDef(theta(node.proc), tuple(formals), walk(node.body, inner))  # type: ignore[arg-type]
        if isinstance(node, ProcCall):
            call = ProcCall(theta(node.proc), tuple(theta(v) for v in node.actuals))
            if node.prefix is None:
                return call
            return Seq(walk(node.prefix, theta), call)  # type: ignore[arg-type]
        if isinstance(node, Fix):
            new = fresh(node.used)
            return Fix(new, theta(node.defined), walk(node.body, theta.extended(node.used, new)))  # type: ignore[arg-type]
        if isinstance(node, Pad):
            return Pad(walk(node.body, theta), tuple(theta(v) for v in node.extra))  # type: ignore[arg-type]
        raise TypeError(f"not a term: {node!r}")

    result = walk(term, Substitution())
    assert result is not None
    return result


def alpha_equal(left: Term, right: Term) -> bool:
    """Structural equality up to the choice of bound names."""
    return canonical(left) == canonical(right)
