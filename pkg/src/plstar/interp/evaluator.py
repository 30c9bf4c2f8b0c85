"""
Reference evaluator for fragment-free terms.

Terms run imperatively against a store of current values; the ``(init, fin)``
environment of the denotational reading is rebuilt around each run. Procedure
calls unfold on demand and the unfolding depth is bounded by the fuel, so
recursion that does not bottom out is reported as ``Bottom(fuel_exhausted=True)``.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Any, Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

from loguru import logger

from ..errors import MissingInput, PhiPrecondViolated, UnboundFragment, UnboundPrimitive
from ..ir.substitution import free_vars
from ..ir.terms import (
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
    subterms,
)
from ..ir.typesig import Sort
from ..analysis.varsets import var_sets
from .builtins import BUILTINS, BuiltinRegistry
from .semantics import Args, Bottom, Closure, DataSem, Env, Fuel, Knot, ProcSem, Sem, Undefined
from .values import UNDEFINED

Result = Union[Env, Bottom]

_MISSING = object()


class _Diverged(Exception):
    pass


class _Stuck(Exception):
    pass


class Machine:
    """Runs terms on a mutable store, tracking unfolding depth."""

    def __init__(
        self,
        fuel: Fuel = Fuel(),
        registry: Optional[BuiltinRegistry] = None,
        int_range: Optional[Tuple[int, int]] = None,
    ):
        self.fuel = fuel
        self.registry = registry or BUILTINS
        self.int_range = int_range
        self.depth = 0

    @contextmanager
    def unfolding(self, name: str) -> Iterator[None]:
        self.depth += 1
        try:
            if self.depth > self.fuel.max_unfoldings:
                raise _Diverged(f"more than {self.fuel.max_unfoldings} nested unfoldings of {name}")
            yield
        finally:
            self.depth -= 1

    def in_range(self, values: Sequence[Any]) -> bool:
        if self.int_range is None:
            return True
        lo, hi = self.int_range
        for value in values:
            if isinstance(value, bool) or value is None or value is UNDEFINED:
                continue
            if isinstance(value, int) and not lo <= value <= hi:
                return False
        return True

    def run(self, term: Optional[Term], store: Dict[VarId, Any], psi: Any) -> Any:
        """Execute ``term``, updating ``store`` in place; return the new ψ."""
        if term is None:
            return psi
        if isinstance(term, Prim):
            return self._prim(term, store, psi)
        if isinstance(term, Seq):
            return self.run(term.second, store, self.run(term.first, store, psi))
        if isinstance(term, Cond):
            value = store.get(term.var, UNDEFINED)
            if value is True:
                return self.run(term.then, store, psi)
            if value is False:
                return self.run(term.orelse, store, psi)
            raise _Stuck(f"condition {term.var.name} is {value!r}")
        if isinstance(term, Local):
            saved = store.pop(term.var, _MISSING)
            if term.var.is_data:
                store[term.var] = UNDEFINED
            try:
                return self.run(term.body, store, psi)
            finally:
                store.pop(term.var, None)
                if saved is not _MISSING:
                    store[term.var] = saved
        if isinstance(term, ProcDef):
            store[term.proc] = self._closure(term, store)
            return psi
        if isinstance(term, ProcCall):
            psi = self.run(term.prefix, store, psi)
            return self._call(term, store, psi)
        if isinstance(term, Fix):
            knot = Knot(term.used, term.defined, term.body)
            saved = store.get(term.used, _MISSING)
            store[term.used] = knot
            try:
                psi = self.run(term.body, store, psi)
            finally:
                if saved is _MISSING:
                    store.pop(term.used, None)
                else:
                    store[term.used] = saved
            target = store.get(term.defined)
            if isinstance(target, ProcSem):
                knot.target = target
            return psi
        if isinstance(term, Pad):
            return self.run(term.body, store, psi)
        if isinstance(term, Fragment):
            raise UnboundFragment(f"fragment {term.name} has no meaning until instantiated", term.span)
        raise TypeError(f"not a term: {term!r}")

    def _closure(self, term: ProcDef, store: Mapping[VarId, Any]) -> Closure:
        body_free = free_vars(term.body) - set(term.formals)
        captured = [(v, store[v]) for v in body_free if v != term.proc and v in store]
        return Closure(term.proc, term.formals, term.body, captured, recursive=term.proc in body_free)

    def _prim(self, term: Prim, store: Dict[VarId, Any], psi: Any) -> Any:
        builtin = self.registry.lookup(term.name)
        if builtin is None:
            raise UnboundPrimitive(f"no builtin named {term.name}", term.span)
        actuals = [v for v in term.vars if not v.is_psi]
        args = tuple(
            store.get(v, UNDEFINED) if arg.io.reads else None for v, arg in zip(actuals, builtin.sig.args)
        )
        if any(a is UNDEFINED for a, arg in zip(args, builtin.sig.args) if arg.io.reads):
            raise _Stuck(f"{term.name} reads an undefined value")
        try:
            result = builtin.apply(args)
        except Undefined as e:
            raise _Stuck(f"{term.name}: {e}") from None
        if not self.in_range(result):
            raise _Stuck(f"{term.name} left the value domain")
        for var, arg, value in zip(actuals, builtin.sig.args, result):
            if arg.io.writes:
                store[var] = value
        effect = term.effect.psi_effect or builtin.effect.psi_effect
        if effect == "havoc":
            listed = set(actuals)
            for var in list(store):
                if var.is_data and var.sort == Sort.INT and var not in listed:
                    store[var] = 0
        if effect in ("tick", "havoc"):
            return psi + 1 if isinstance(psi, int) else psi
        return psi

    def _call(self, term: ProcCall, store: Dict[VarId, Any], psi: Any) -> Any:
        proc = store.get(term.proc)
        if not isinstance(proc, ProcSem):
            raise _Stuck(f"procedure {term.proc.name} is not defined")
        actuals = [v for v in term.actuals if not v.is_psi]
        args: Args = tuple(
            store.get(v, UNDEFINED) if (arg.io.reads or v.is_proc) else None
            for v, arg in zip(actuals, proc.sig.args)
        )
        outcome = proc.call(args, psi, self)
        if outcome is None:
            raise _Stuck(f"call of {term.proc.name} has no result")
        outputs, psi = outcome
        for var, arg, value in zip(actuals, proc.sig.args, outputs):
            if arg.io.writes:
                store[var] = value
        return psi

    def call(self, proc: ProcSem, args: Args, psi: Any = 0) -> Union[Tuple[Args, Any], Bottom]:
        """Call a procedure value directly, converting ⊥ into ``Bottom``."""
        try:
            outcome = proc.call(args, psi, self)
        except _Diverged as e:
            return Bottom(fuel_exhausted=True, reason=str(e))
        except _Stuck as e:
            return Bottom(reason=str(e))
        return Bottom(reason=f"{proc.name} has no result") if outcome is None else outcome


def builtin_bindings(term: Term, env: Mapping[VarId, Sem], registry: BuiltinRegistry) -> Dict[VarId, Sem]:
    """Bind free procedure inputs named after builtins, unless ``env`` binds them."""
    bindings: Dict[VarId, Sem] = {}
    for var in var_sets(term).inputs:
        if var.is_proc and var not in env:
            builtin = registry.lookup(var.name)
            if builtin is not None and builtin.sig == var.sig:
                bindings[var] = builtin.intrinsic()
    return bindings


def eval(
    term: Term,
    input_env: Env,
    fuel: Fuel = Fuel(),
    registry: Optional[BuiltinRegistry] = None,
    int_range: Optional[Tuple[int, int]] = None,
) -> Result:
    """Evaluate a fragment-free term.

    Args:
        term: the program term
        input_env: initial semantics of the term's variables; free procedures
            named after builtins are bound automatically
        fuel: unfolding and enumeration limits
        registry: builtins for ``Prim`` leaves and auto-bound procedures
        int_range: integer results outside this range are ⊥

    Returns:
        The environment of ``(init, fin)`` pairs and procedures, or ``Bottom``.

    Raises:
        MissingInput: an input variable has no semantics in ``input_env``
    """
    registry = registry or BUILTINS
    sets = var_sets(term)
    env = input_env.updated(builtin_bindings(term, input_env, registry))
    missing = sorted(v.name for v in (sets.inputs | sets.updates) if v not in env)
    if missing:
        raise MissingInput(f"no input semantics for {', '.join(missing)}", term.span)
    store: Dict[VarId, Any] = {}
    for var, sem in env.items():
        store[var] = sem.init if isinstance(sem, DataSem) else sem
    machine = Machine(fuel, registry, int_range)
    try:
        psi = machine.run(term, store, env.psi.init)
    except _Diverged as e:
        logger.debug(f"Evaluation ran out of fuel: {e}")
        return Bottom(fuel_exhausted=True, reason=str(e))
    except _Stuck as e:
        return Bottom(reason=str(e))
    result: Dict[VarId, Sem] = {}
    for var in set(env) | sets.data | sets.procs:
        sem = env.get(var)
        if var.is_data:
            init = sem.init if isinstance(sem, DataSem) else UNDEFINED
            result[var] = DataSem(init, store.get(var, UNDEFINED))
        elif var in store:
            result[var] = store[var]
    return Env(result, DataSem(env.psi.init, psi))


def compose_phi(f: Env, g: Env, first: Term, second: Term) -> Env:
    """φ(f, g): procedures merged, shared data chained ``(α, β)·(β, γ) = (α, γ)``.

    Raises:
        PhiPrecondViolated: a shared data variable does not chain, or a shared
            procedure has different meanings in f and g
    """
    shared_data = var_sets(first).data & var_sets(second).data
    merged: Dict[VarId, Sem] = {}
    for var in set(f) | set(g):
        left, right = f.get(var), g.get(var)
        if left is None or right is None:
            merged[var] = left if left is not None else right  # type: ignore[assignment]
        elif isinstance(left, DataSem) and isinstance(right, DataSem):
            if left.fin != right.init or type(left.fin) is not type(right.init):
                reason = "shared" if var in shared_data else "common"
                raise PhiPrecondViolated(f"{reason} variable {var.name}: {left!r} does not chain with {right!r}")
            merged[var] = DataSem(left.init, right.fin)
        elif left != right:
            raise PhiPrecondViolated(f"procedure {var.name} differs between the two environments")
        else:
            merged[var] = left
    if f.psi.fin != g.psi.init:
        raise PhiPrecondViolated(f"psi: {f.psi!r} does not chain with {g.psi!r}")
    return Env(merged, DataSem(f.psi.init, g.psi.fin))


def find_definition(term: Term, name: str) -> Optional[ProcDef]:
    for node in subterms(term):
        if isinstance(node, ProcDef) and node.proc.name == name:
            return node
    return None


def eval_call(
    program: Term,
    entry: str,
    args: Sequence[Any],
    fuel: Fuel = Fuel(),
    registry: Optional[BuiltinRegistry] = None,
    env: Optional[Env] = None,
    int_range: Optional[Tuple[int, int]] = None,
) -> Union[Dict[str, Any], Bottom]:
    """Run ``program``, then call its procedure ``entry`` on positional inputs.

    ``args`` supplies one value per read parameter (``in`` or ``inout``), in
    order. Returns the final values of the written parameters by name; with
    ``int_range`` set, integer results outside it are ⊥.
    """
    definition = find_definition(program, entry)
    if definition is None:
        raise MissingInput(f"program defines no procedure {entry}")
    sig = definition.proc.sig
    read_positions = [i for i, arg in enumerate(sig.args) if arg.io.reads]
    if len(args) != len(read_positions):
        raise MissingInput(f"{entry} takes {len(read_positions)} inputs, got {len(args)}")
    outcome = eval(program, env or Env(), fuel, registry, int_range)
    if isinstance(outcome, Bottom):
        return outcome
    proc = outcome.get(definition.proc)
    if not isinstance(proc, ProcSem):
        return Bottom(reason=f"{entry} was not defined by the program")
    call_args = [None] * sig.arity
    for position, value in zip(read_positions, args):
        call_args[position] = value
    result = Machine(fuel, registry, int_range).call(proc, tuple(call_args), outcome.psi.fin)
    if isinstance(result, Bottom):
        return result
    outputs, _ = result
    return {
        formal.name: value
        for formal, arg, value in zip(definition.formals, sig.args, outputs)
        if arg.io.writes
    }
