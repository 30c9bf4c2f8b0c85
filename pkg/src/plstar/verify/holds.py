"""
Brute-force truth of ``R^L([x]P)`` over a finite domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from loguru import logger

from ..analysis.preconditions import pad_variables
from ..errors import UnboundFragment, UnknownVariable
from ..interp.builtins import BUILTINS, BuiltinRegistry
from ..interp.enumeration import Models, run_all
from ..interp.evaluator import Result
from ..interp.semantics import Bottom, Domain, Env, Fuel, Sem
from ..ir.substitution import free_vars
from ..ir.terms import PSI, Term, VarId, fragment_names, occurring_vars
from .library import load_libraries
from .relations import Inconclusive, Library, Named, RelContext, RelExpr, Relation


@dataclass(frozen=True)
class Valid:
    checked: int

    status = "Valid"


@dataclass(frozen=True)
class CounterExample:
    env: Env
    input: Env
    checked: int

    status = "CounterExample"


@dataclass(frozen=True)
class Unknown:
    reason: str
    checked: int

    status = "Unknown"


Verdict = Union[Valid, CounterExample, Unknown]
Outcomes = List[Tuple[Env, Result]]


def judgment_term(term: Term, vars_: Sequence[VarId]) -> Term:
    """``[x]P``: P padded with the listed data variables it does not mention."""
    free = free_vars(term)
    extra = [v for v in dict.fromkeys(vars_) if v.is_data and not v.is_psi and v not in free]
    return pad_variables(term, extra) if extra else term


def outcomes(
    term: Term,
    vars_: Sequence[VarId],
    domain: Domain,
    fuel: Fuel,
    models: Optional[Models] = None,
    registry: Optional[BuiltinRegistry] = None,
    cache: Optional[Dict[Any, Outcomes]] = None,
) -> Outcomes:
    """Every (input, outcome) pair of ``[vars]term``, over the full input space.

    Initial values of pure outputs are enumerated too: relations may constrain them.
    """
    padded = judgment_term(term, vars_)
    key = (padded, domain, fuel)
    if cache is not None and key in cache:
        return cache[key]
    result = list(run_all(padded, domain, fuel, models, registry=registry))
    if cache is not None:
        cache[key] = result
    return result


def select(env: Env, vars_: Sequence[VarId]) -> List[Sem]:
    """The semantics of each listed variable; ψ reads the environment's ψ pair."""
    sems: List[Sem] = []
    for var in vars_:
        if var.is_psi:
            sems.append(env.psi)
        elif var in env:
            sems.append(env[var])
        else:
            raise UnknownVariable(f"{var.name} has no semantics in the judgment")
    return sems


def _default_vars(relation: RelExpr, term: Term, ctx: RelContext) -> List[VarId]:
    if isinstance(relation, Named):
        relation = ctx.resolve(relation)
    if not isinstance(relation, Relation):
        raise UnknownVariable("a variable list is required for a composite relation")
    by_name = {v.name: v for v in occurring_vars(term)}
    vars_: List[VarId] = []
    for name in relation.params:
        if relation.psi_aware and name == relation.params[-1]:
            vars_.append(PSI)
        elif name in by_name:
            vars_.append(by_name[name])
        else:
            raise UnknownVariable(f"relation {relation.name} mentions {name}, which the term does not")
    return vars_


def check_outcomes(relation: RelExpr, vars_: Sequence[VarId], results: Outcomes, ctx: RelContext) -> Verdict:
    """Partial correctness over enumerated outcomes: ⊥ outcomes satisfy everything."""
    checked = 0
    unknown: Optional[str] = None
    for input_env, outcome in results:
        if isinstance(outcome, Bottom):
            if outcome.fuel_exhausted and unknown is None:
                unknown = outcome.reason
            continue
        try:
            ok = relation.evaluate(select(outcome, vars_), ctx)
        except Inconclusive as e:
            unknown = unknown or str(e)
            continue
        checked += 1
        if not ok:
            return CounterExample(outcome, input_env, checked)
    if unknown is not None:
        return Unknown(unknown, checked)
    return Valid(checked)


def holds(
    relation: RelExpr,
    term: Term,
    domain: Domain = Domain(),
    fuel: Fuel = Fuel(),
    vars: Optional[Sequence[VarId]] = None,
    models: Optional[Models] = None,
    library: Optional[Library] = None,
    registry: Optional[BuiltinRegistry] = None,
    bindings: Optional[Mapping[str, int]] = None,
) -> Verdict:
    """Decide ``R^L([x]P) ≡ ∀y({y : [x]P} ⊃ R(y))`` on the domain.

    Args:
        relation: a relation or relation expression
        term: a fragment-free program term
        domain: value ranges to enumerate
        fuel: unfolding and enumeration limits
        vars: the variable list x; defaults to the relation's parameter names
        models: candidate semantics for free procedures without a builtin
        library: relations that named references resolve against
        registry: builtins for primitives
        bindings: values of symbolic relation parameters

    Returns:
        ``Valid``, a ``CounterExample`` with the offending environment, or
        ``Unknown`` when some run exhausted its fuel and nothing failed.

    Raises:
        DomainTooLarge: the input space exceeds the enumeration limit
        UnboundFragment: the term still contains fragments
    """
    names = fragment_names(term)
    if names:
        raise UnboundFragment(f"cannot enumerate a term with fragments {', '.join(sorted(names))}")
    ctx = RelContext(library or load_libraries(), domain, fuel, registry or BUILTINS, dict(bindings or {}))
    vars_ = list(vars) if vars is not None else _default_vars(relation, term, ctx)
    verdict = check_outcomes(relation, vars_, outcomes(term, vars_, domain, fuel, models, registry), ctx)
    logger.debug(f"holds {relation} on [{', '.join(v.name for v in vars_)}]: {verdict.status}")
    return verdict
