"""
Explicit Kleene iteration for recursive procedures on a finite domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Any, Dict, List, Optional, Tuple

from loguru import logger

from ..errors import KindError, MissingInput, NoLeastSolution
from ..ir.substitution import Substitution, apply_subst, fresh_var, free_vars
from ..ir.terms import Fix, ProcDef, Term, VarId, occurring_vars, subterms
from ..ir.typesig import DataKind
from .builtins import BUILTINS, BuiltinRegistry
from .enumeration import values_of_sort
from .evaluator import Machine, builtin_bindings
from .semantics import Args, Bottom, DataSem, Domain, Env, Fuel, Graph, ProcSem


@dataclass(frozen=True)
class KleeneChain:
    """The graphs q0 <= q1 <= ... and whether the chain became stationary."""

    proc: str
    graphs: Tuple[Graph, ...]
    converged: bool

    @property
    def limit(self) -> Graph:
        return self.graphs[-1]

    def __len__(self) -> int:
        return len(self.graphs)


def _open_recursion(term: Term, name: Optional[str]) -> Fix:
    """Present the recursion of ``term`` as a fix node.

    A fix node is used as it is. A recursive procedure definition ``proc p``
    becomes ``fix p' as p in proc p ... end`` with the self-references renamed.
    """
    if isinstance(term, Fix) and (name is None or name in (term.used.name, term.defined.name)):
        return term
    for node in subterms(term):
        if isinstance(node, Fix) and (name is None or name in (node.used.name, node.defined.name)):
            return node
        if isinstance(node, ProcDef) and (name is None or node.proc.name == name):
            if node.proc not in free_vars(node.body) - set(node.formals):
                continue
            used = fresh_var(node.proc, occurring_vars(node))
            body = apply_subst(node.body, Substitution({node.proc: used}))
            return Fix(used, node.proc, ProcDef(node.proc, node.formals, body))
    raise MissingInput(f"no recursive procedure {name} in the term" if name else "the term has no recursive procedure")


def _argument_space(proc: VarId, domain: Domain) -> List[Args]:
    options: List[Tuple[Any, ...]] = []
    for arg in proc.sig.args:
        if not arg.io.reads:
            options.append((None,))
        elif isinstance(arg.kind, DataKind):
            options.append(values_of_sort(arg.kind.sort, domain))
        else:
            raise KindError(f"{proc.name} takes a procedure argument; only data parameters can be tabulated")
    return [tuple(combo) for combo in product(*options)]


def kleene_chain(
    term: Term,
    proc: Optional[str] = None,
    domain: Domain = Domain(),
    fuel: Fuel = Fuel(),
    env: Optional[Env] = None,
    registry: Optional[BuiltinRegistry] = None,
) -> KleeneChain:
    """Tabulate q0 = ⊥, q_{k+1} = body with the recursive reference bound to q_k.

    The chain stops when two consecutive graphs are equal, or after
    ``fuel.max_unfoldings`` steps with ``converged`` false.

    Raises:
        NoLeastSolution: some step is not above its predecessor
    """
    registry = registry or BUILTINS
    fix = _open_recursion(term, proc)
    base = dict(env or Env())
    base.update(builtin_bindings(fix, base, registry))
    store: Dict[VarId, Any] = {v: s.init if isinstance(s, DataSem) else s for v, s in base.items()}
    space = _argument_space(fix.defined, domain)
    machine = Machine(fuel, registry, domain.int_range)
    graphs: List[Graph] = [Graph(fix.defined.name, fix.defined.sig, {})]
    for step in range(fuel.max_unfoldings):
        current = graphs[-1]
        local = dict(store)
        local[fix.used] = Graph(fix.used.name, fix.used.sig, current.table)
        machine.run(fix.body, local, 0)
        target = local.get(fix.defined)
        if not isinstance(target, ProcSem):
            raise MissingInput(f"fix body does not define {fix.defined.name}")
        table: Dict[Args, Args] = {}
        for args in space:
            outcome = machine.call(target, args)
            if not isinstance(outcome, Bottom):
                table[args] = outcome[0]
        following = Graph(fix.defined.name, fix.defined.sig, table)
        if not current.leq(following):
            raise NoLeastSolution(f"step {step + 1} of {fix.defined.name} is not above its predecessor")
        if following == current:
            logger.debug(f"Kleene chain for {fix.defined.name} stationary after {step} steps")
            return KleeneChain(fix.defined.name, tuple(graphs), True)
        graphs.append(following)
    logger.warning(f"Kleene chain for {fix.defined.name} not stationary after {fuel.max_unfoldings} steps")
    return KleeneChain(fix.defined.name, tuple(graphs), False)
