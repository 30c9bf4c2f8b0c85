"""
Stand-in procedures for free procedure variables during brute-force checking.

A proof names, per free procedure variable, the models it is checked
against; each model is a procedure semantics built for that variable's
signature.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Mapping, Sequence

from ..errors import UnknownRulePayload
from ..interp.semantics import Args, Intrinsic, ProcSem, Undefined
from ..ir.typesig import TypeSig

ModelFactory = Callable[[str, TypeSig], ProcSem]


def _range(array: tuple, p: int, r: int) -> None:
    if p < r and not (1 <= p and r <= len(array)):
        raise Undefined(f"range {p}..{r} outside 1..{len(array)}")


def _sorted_slice(array: tuple, p: int, r: int) -> tuple:
    return array[: p - 1] + tuple(sorted(array[p - 1 : r])) + array[r:]


def sort_ref(name: str, sig: TypeSig) -> ProcSem:
    """Sorts A[p..r]; leaves A alone when p >= r."""

    def run(args: Args) -> Args:
        array, p, r = args
        _range(array, p, r)
        return (_sorted_slice(array, p, r) if p < r else array, None, None)

    return Intrinsic(f"{name}:sort_ref", sig, run)


def sort_pairs(name: str, sig: TypeSig) -> ProcSem:
    """Sorts ranges of at most two elements and returns longer ones untouched."""

    def run(args: Args) -> Args:
        array, p, r = args
        _range(array, p, r)
        return (_sorted_slice(array, p, r) if 0 < r - p <= 1 else array, None, None)

    return Intrinsic(f"{name}:sort_pairs", sig, run)


def bottom(name: str, sig: TypeSig) -> ProcSem:
    def run(args: Args) -> Args:
        raise Undefined(f"{name} never returns")

    return Intrinsic(f"{name}:bottom", sig, run)


def identity(name: str, sig: TypeSig) -> ProcSem:
    """Echoes every inout argument; pure outputs are ⊥."""

    def run(args: Args) -> Args:
        if any(not a.io.reads for a in sig.args):
            raise Undefined(f"{name} has pure outputs")
        return tuple(v if a.io.writes else None for v, a in zip(args, sig.args))

    return Intrinsic(f"{name}:identity", sig, run)


MODELS: Dict[str, ModelFactory] = {
    "sort_ref": sort_ref,
    "sort_pairs": sort_pairs,
    "bottom": bottom,
    "identity": identity,
}


def build_models(wanted: Mapping[str, Sequence[str]], sigs: Mapping[str, TypeSig]) -> Dict[str, List[ProcSem]]:
    """Instantiate named models for each procedure variable.

    Raises:
        UnknownRulePayload: an unknown model or an undeclared procedure
    """
    built: Dict[str, List[ProcSem]] = {}
    for var, names in wanted.items():
        if var not in sigs:
            raise UnknownRulePayload(f"models given for {var}, which is not a declared procedure")
        unknown = [n for n in names if n not in MODELS]
        if unknown:
            raise UnknownRulePayload(f"unknown models {', '.join(unknown)}")
        built[var] = [MODELS[n](var, sigs[var]) for n in names]
    return built
