"""
Built-in primitives and the registry the evaluator looks them up in.

A transformer receives one entry per argument (the value at read positions,
``None`` at pure outputs) and returns a tuple of the same length holding the
new value at every written position and ``None`` elsewhere. Raising
``Undefined`` makes the call ⊥. Arrays are tuples indexed from 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator, Optional, Tuple

from loguru import logger

from ..errors import DuplicateBuiltin
from ..ir.terms import EffectSummary
from ..ir.typesig import TypeSig, parse_typesig
from .semantics import Args, Intrinsic, Undefined

Transformer = Callable[[Args], Args]

PSI_EFFECTS = ("tick", "havoc")


@dataclass(frozen=True)
class Builtin:
    name: str
    sig: TypeSig
    transformer: Transformer
    effect: EffectSummary = EffectSummary()

    def apply(self, args: Args) -> Args:
        result = tuple(self.transformer(args))
        if len(result) != self.sig.arity:
            raise Undefined(f"{self.name} returned {len(result)} values for {self.sig.arity} arguments")
        return result

    def intrinsic(self) -> Intrinsic:
        return Intrinsic(self.name, self.sig, self.apply)


class BuiltinRegistry:
    """Name-indexed builtins; frozen registries reject new entries."""

    def __init__(self) -> None:
        self._entries: Dict[str, Builtin] = {}
        self._frozen = False

    def register(
        self,
        name: str,
        sig: TypeSig | str,
        transformer: Transformer,
        effect: Optional[EffectSummary] = None,
    ) -> Builtin:
        if name in self._entries:
            raise DuplicateBuiltin(f"builtin {name} is already registered")
        if self._frozen:
            raise DuplicateBuiltin(f"registry is frozen; cannot add {name}")
        if isinstance(sig, str):
            sig = parse_typesig(sig)
        effect = effect or EffectSummary()
        if effect.psi_effect is not None and effect.psi_effect not in PSI_EFFECTS:
            raise DuplicateBuiltin(f"unknown psi effect {effect.psi_effect!r} for {name}")
        builtin = Builtin(name, sig, transformer, effect)
        self._entries[name] = builtin
        logger.debug(f"Registered builtin {name} {sig}")
        return builtin

    def lookup(self, name: str) -> Optional[Builtin]:
        return self._entries.get(name)

    def __contains__(self, name: object) -> bool:
        return name in self._entries

    def __iter__(self) -> Iterator[Builtin]:
        return iter(sorted(self._entries.values(), key=lambda b: b.name))

    def freeze(self) -> "BuiltinRegistry":
        self._frozen = True
        return self

    def copy(self) -> "BuiltinRegistry":
        clone = BuiltinRegistry()
        clone._entries = dict(self._entries)
        return clone


def _index(array: Tuple[int, ...], i: Any) -> int:
    if not isinstance(i, int) or isinstance(i, bool) or not 1 <= i <= len(array):
        raise Undefined(f"index {i} outside 1..{len(array)}")
    return i - 1


def hoare_partition(array: Tuple[int, ...], p: int, r: int) -> Tuple[Tuple[int, ...], int]:
    """Partition A[p..r] around the pivot A[p].

    Returns the rearranged array and q with p <= q < r such that every element
    of A[p..q] is at most every element of A[q+1..r]. When p >= r the array
    comes back unchanged with q = p.
    """
    if p >= r:
        return array, p
    _index(array, p)
    _index(array, r)
    a = list(array)
    pivot = a[p - 1]
    i, j = p - 1, r + 1
    while True:
        j -= 1
        while a[j - 1] > pivot:
            j -= 1
        i += 1
        while a[i - 1] < pivot:
            i += 1
        if i < j:
            a[i - 1], a[j - 1] = a[j - 1], a[i - 1]
        else:
            return tuple(a), j


def _update1(args: Args) -> Args:
    array, n = args
    k = _index(array, n)
    return (array[:k] + (array[k] + 1,) + array[k + 1 :], None)


def _partition(args: Args) -> Args:
    array, p, r, _ = args
    result, q = hoare_partition(array, p, r)
    return (result, None, None, q)


def _get(args: Args) -> Args:
    array, i, _ = args
    return (None, None, array[_index(array, i)])


def _set(args: Args) -> Args:
    array, i, value = args
    k = _index(array, i)
    return (array[:k] + (value,) + array[k + 1 :], None, None)


def default_registry() -> BuiltinRegistry:
    """The shipped builtins over int, bool and int-array."""
    registry = BuiltinRegistry()
    int3 = "(in int, in int, out int)"
    registry.register("0", "(out int)", lambda a: (0,))
    registry.register("1", "(out int)", lambda a: (1,))
    registry.register("=", "(in int, in int, out bool)", lambda a: (None, None, a[0] == a[1]))
    for name in ("lt", "<"):
        registry.register(name, "(in int, in int, out bool)", lambda a: (None, None, a[0] < a[1]))
    registry.register("-", int3, lambda a: (None, None, a[0] - a[1]))
    registry.register("*", int3, lambda a: (None, None, a[0] * a[1]))
    registry.register("+", int3, lambda a: (None, None, a[0] + a[1]))
    for name in ("inc", "+1"):
        registry.register(name, "(in int, out int)", lambda a: (None, a[0] + 1))
    registry.register("id", "(in int, out int)", lambda a: (None, a[0]))
    registry.register("get", "(in int-array, in int, out int)", _get)
    registry.register("set", "(inout int-array, in int, in int)", _set)
    registry.register("len", "(in int-array, out int)", lambda a: (None, len(a[0])))
    registry.register("Update1", "(inout int-array, in int)", _update1)
    registry.register("Partition", "(inout int-array, in int, in int, out int)", _partition)
    return registry


# populated once at import; extend a copy instead
BUILTINS = default_registry().freeze()


def register_builtin(
    name: str,
    sig: TypeSig | str,
    transformer: Transformer,
    effect: Optional[EffectSummary] = None,
    registry: Optional[BuiltinRegistry] = None,
) -> Builtin:
    """Add a builtin to ``registry``.

    The process-wide ``BUILTINS`` is frozen, so without ``registry`` this raises;
    pass ``default_registry().copy()`` and hand the same registry to ``eval``.

    Args:
        name: callee name used in programs
        sig: signature, as a ``TypeSig`` or text such as ``(in int, out int)``
        transformer: function from the argument tuple to the written values
        effect: declared store effect; ``psi_effect`` may be ``tick`` or ``havoc``
        registry: the registry to extend, ``BUILTINS`` when omitted

    Raises:
        DuplicateBuiltin: the name is taken or the registry is frozen
    """
    return (registry or BUILTINS).register(name, sig, transformer, effect)
