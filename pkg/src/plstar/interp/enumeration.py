"""
Finite-domain denotations: every input environment over a domain, run through eval.
"""

from __future__ import annotations

from itertools import product
from math import prod
from typing import Any, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from loguru import logger

from ..errors import DomainTooLarge, MissingInput
from ..ir.terms import Term, VarId, sorted_vars
from ..ir.typesig import Sort
from ..analysis.varsets import var_sets
from .builtins import BUILTINS, BuiltinRegistry
from .evaluator import Result, builtin_bindings, eval
from .semantics import DataSem, Domain, Env, Fuel, ProcSem
from .values import UNDEFINED, UNIT

Models = Mapping[Union[VarId, str], Sequence[ProcSem]]


def values_of_sort(sort: Sort, domain: Domain) -> Tuple[Any, ...]:
    """All defined values of a sort within the domain, in a fixed order."""
    if sort == Sort.INT:
        lo, hi = domain.int_range
        return tuple(range(lo, hi + 1))
    if sort == Sort.BOOL:
        return (False, True)
    if sort == Sort.INT_ARRAY:
        lo, hi = domain.array_values
        elements = range(lo, hi + 1)
        arrays: List[Tuple[int, ...]] = []
        for length in range(domain.array_min, domain.array_max + 1):
            arrays.extend(product(elements, repeat=length))
        return tuple(arrays)
    if sort == Sort.UNIT:
        return (UNIT,)
    return tuple(domain.psi_values)


def _model_choices(var: VarId, models: Models) -> Optional[Sequence[ProcSem]]:
    if var in models:
        return models[var]  # type: ignore[index]
    return models.get(var.name)  # type: ignore[call-overload]


class InputSpace:
    """The product of value choices for the free variables of a term."""

    def __init__(
        self,
        term: Term,
        domain: Domain,
        models: Optional[Models] = None,
        significant_only: bool = False,
        registry: Optional[BuiltinRegistry] = None,
        fixed: Optional[Mapping[VarId, Any]] = None,
    ):
        sets = var_sets(term)
        models = models or {}
        fixed = dict(fixed or {})
        registry = registry or BUILTINS
        self.choices: List[Tuple[VarId, Sequence[Any]]] = []
        auto = builtin_bindings(term, {v: None for v in fixed}, registry)  # type: ignore[misc]
        for var in sorted_vars(sets.procs - set(fixed)):
            options = _model_choices(var, models)
            if options is not None:
                self.choices.append((var, tuple(options)))
            elif var in auto:
                self.choices.append((var, (auto[var],)))
            elif var in sets.inputs:
                raise MissingInput(f"procedure {var.name} needs a builtin or a model to be enumerated")
        for var in sorted_vars(sets.data - set(fixed)):
            if significant_only and var not in sets.significant:
                self.choices.append((var, (UNDEFINED,)))
            else:
                self.choices.append((var, values_of_sort(var.sort, domain)))
        self.fixed = fixed
        self.psi_values = domain.psi_values

    @property
    def size(self) -> int:
        return prod(len(options) for _, options in self.choices) * len(self.psi_values)

    def __iter__(self) -> Iterator[Env]:
        names = [var for var, _ in self.choices]
        for psi in self.psi_values:
            for combo in product(*(options for _, options in self.choices)):
                bindings: Dict[VarId, Any] = dict(self.fixed)
                bindings.update(zip(names, combo))
                yield Env.initial(bindings, psi)


def input_space(
    term: Term,
    domain: Domain,
    fuel: Fuel,
    models: Optional[Models] = None,
    significant_only: bool = False,
    registry: Optional[BuiltinRegistry] = None,
    fixed: Optional[Mapping[VarId, Any]] = None,
) -> InputSpace:
    space = InputSpace(term, domain, models, significant_only, registry, fixed)
    if space.size > fuel.max_enumeration:
        raise DomainTooLarge(
            f"{space.size} input environments over {domain.describe()} exceed the limit of {fuel.max_enumeration}"
        )
    logger.debug(f"Enumerating {space.size} input environments over {domain.describe()}")
    return space


def run_all(
    term: Term,
    domain: Domain,
    fuel: Fuel = Fuel(),
    models: Optional[Models] = None,
    significant_only: bool = False,
    registry: Optional[BuiltinRegistry] = None,
    fixed: Optional[Mapping[VarId, Any]] = None,
) -> Iterator[Tuple[Env, Result]]:
    """Pairs of input environment and outcome, in enumeration order."""
    space = input_space(term, domain, fuel, models, significant_only, registry, fixed)
    for env in space:
        yield env, eval(term, env, fuel, registry, domain.int_range)


def semantics_set(
    term: Term,
    domain: Domain,
    fuel: Fuel = Fuel(),
    models: Optional[Models] = None,
    significant_only: bool = False,
    registry: Optional[BuiltinRegistry] = None,
) -> FrozenSet[Env]:
    """The finite-domain denotation of ``term``: every total outcome.

    Raises:
        DomainTooLarge: the input space exceeds ``fuel.max_enumeration``
        MissingInput: a free procedure has neither a builtin nor a model
    """
    return frozenset(
        outcome
        for _, outcome in run_all(term, domain, fuel, models, significant_only, registry)
        if isinstance(outcome, Env)
    )


def project(envs: FrozenSet[Env], vars_: FrozenSet[VarId]) -> FrozenSet[Env]:
    return frozenset(env.restrict(vars_) for env in envs)


def data_pairs(env: Env) -> Dict[str, DataSem]:
    """Data semantics by variable name, for display and assertions."""
    return {var.name: sem for var, sem in env.items() if isinstance(sem, DataSem)}
