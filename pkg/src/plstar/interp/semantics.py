"""
Semantic objects: data pairs, procedure semantics, environments and limits.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable, Dict, Iterable, Iterator, Optional, Sequence, Tuple, Union

from ..errors import ConfigError
from ..ir.substitution import Substitution
from ..ir.terms import Term, VarId, var_order
from ..ir.typesig import ArgSig, TypeSig
from .values import UNDEFINED, format_value

if TYPE_CHECKING:
    from .evaluator import Machine

Args = Tuple[Any, ...]
CallResult = Optional[Tuple[Args, Any]]


class Undefined(Exception):
    """Raised by a builtin whose result is ⊥ for the given arguments."""


@dataclass(frozen=True)
class DataSem:
    """The (init, fin) pair of a data variable."""

    init: Any
    fin: Any = UNDEFINED

    def __repr__(self) -> str:
        return f"({format_value(self.init)}, {format_value(self.fin)})"


class ProcSem(ABC):
    """Semantics of a procedure variable.

    Calls take one entry per argument (the value for read positions, ``None``
    for pure outputs) and the current ψ, and return the written values plus
    the new ψ, or ``None`` for ⊥.
    """

    name: str
    sig: TypeSig

    @property
    @abstractmethod
    def key(self) -> Tuple:
        ...

    @abstractmethod
    def call(self, args: Args, psi: Any, machine: "Machine") -> CallResult:
        ...

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ProcSem) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class Intrinsic(ProcSem):
    """A procedure implemented in Python: builtins and verification models."""

    def __init__(self, name: str, sig: TypeSig, transformer: Callable[[Args], Args]):
        self.name = name
        self.sig = sig
        self.transformer = transformer

    @property
    def key(self) -> Tuple:
        return ("intrinsic", self.name, self.sig)

    def call(self, args: Args, psi: Any, machine: "Machine") -> CallResult:
        if any(a is UNDEFINED for a, arg in zip(args, self.sig.args) if arg.io.reads):
            return None
        try:
            outputs = self.transformer(args)
        except Undefined:
            return None
        if not machine.in_range(outputs):
            return None
        return tuple(outputs), psi


class Closure(ProcSem):
    """The procedure a ``proc`` definition builds: its body over captured values."""

    def __init__(
        self,
        proc: VarId,
        formals: Tuple[VarId, ...],
        body: Term,
        captured: Iterable[Tuple[VarId, Any]],
        recursive: bool,
    ):
        self.proc = proc
        self.name = proc.name
        self.sig = proc.sig
        self.formals = formals
        self.body = body
        self.captured = tuple(sorted(captured, key=lambda item: var_order(item[0])))
        self.recursive = recursive
        self._cache: Dict[Tuple[Args, Any], Tuple[Args, Any]] = {}

    @property
    def key(self) -> Tuple:
        return ("closure", self.proc, self.formals, self.body, self.captured)

    def call(self, args: Args, psi: Any, machine: "Machine") -> CallResult:
        cached = self._cache.get((args, psi))
        if cached is not None:
            return cached
        store: Dict[VarId, Any] = dict(self.captured)
        if self.recursive:
            store[self.proc] = self
        for formal, arg, value in zip(self.formals, self.sig.args, args):
            store[formal] = value if arg.io.reads or formal.is_proc else UNDEFINED
        with machine.unfolding(self.name):
            psi_out = machine.run(self.body, store, psi)
        outputs = tuple(store.get(f, UNDEFINED) if arg.io.writes else None for f, arg in zip(self.formals, self.sig.args))
        result = (outputs, psi_out)
        self._cache[(args, psi)] = result
        return result


class Knot(ProcSem):
    """The used procedure of a fix: forwards to the defined one once it exists."""

    def __init__(self, used: VarId, defined: VarId, body: Term):
        self.name = used.name
        self.sig = used.sig
        self.used = used
        self.defined = defined
        self.body = body
        self.target: Optional[ProcSem] = None

    @property
    def key(self) -> Tuple:
        return ("knot", self.used, self.defined, self.body)

    def call(self, args: Args, psi: Any, machine: "Machine") -> CallResult:
        if self.target is None:
            return None
        with machine.unfolding(self.name):
            return self.target.call(args, psi, machine)


class Graph(ProcSem):
    """A procedure given by a finite table from arguments to results."""

    def __init__(self, name: str, sig: TypeSig, table: Mapping[Args, Args]):
        self.name = name
        self.sig = sig
        self.table = dict(table)

    @property
    def key(self) -> Tuple:
        return ("graph", self.name, self.sig, frozenset(self.table.items()))

    def call(self, args: Args, psi: Any, machine: "Machine") -> CallResult:
        result = self.table.get(args)
        return None if result is None else (result, psi)

    def leq(self, other: "Graph") -> bool:
        """Graph inclusion: defined wherever self is, with the same results."""
        return all(other.table.get(args) == result for args, result in self.table.items())

    def __len__(self) -> int:
        return len(self.table)


Sem = Union[DataSem, ProcSem]


class Env(Mapping):
    """An immutable, hashable map from variables to semantics, plus ψ."""

    def __init__(self, bindings: Optional[Mapping[VarId, Sem]] = None, psi: DataSem = DataSem(0, 0)):
        items = dict(bindings or {})
        self._map: Dict[VarId, Sem] = items
        self._items = tuple(sorted(items.items(), key=lambda kv: var_order(kv[0])))
        self.psi = psi

    @classmethod
    def initial(cls, values: Mapping[VarId, Any], psi: Any = 0) -> "Env":
        """Input environment: data variables get their initial values."""
        bindings: Dict[VarId, Sem] = {}
        for var, value in values.items():
            bindings[var] = value if var.is_proc else DataSem(value)
        return cls(bindings, DataSem(psi))

    def __getitem__(self, var: VarId) -> Sem:
        return self._map[var]

    def __iter__(self) -> Iterator[VarId]:
        return (var for var, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Env) and self._items == other._items and self.psi == other.psi

    def __hash__(self) -> int:
        return hash((self._items, self.psi))

    def __repr__(self) -> str:
        parts = [f"{var.name}={sem!r}" for var, sem in self._items]
        return "Env(" + ", ".join(parts) + f", psi={self.psi!r})"

    def by_name(self, name: str) -> Sem:
        for var, sem in self._items:
            if var.name == name:
                return sem
        raise KeyError(name)

    def data(self, var: VarId) -> DataSem:
        sem = self._map[var]
        assert isinstance(sem, DataSem)
        return sem

    def restrict(self, vars_: Iterable[VarId]) -> "Env":
        keep = set(vars_)
        return Env({v: s for v, s in self._items if v in keep}, self.psi)

    def updated(self, bindings: Mapping[VarId, Sem]) -> "Env":
        merged = dict(self._map)
        merged.update(bindings)
        return Env(merged, self.psi)

    def pullback(self, theta: Substitution, vars_: Iterable[VarId]) -> "Env":
        """The environment f∘Θ over ``vars_``: each x gets the semantics of Θ(x)."""
        return Env({x: self._map[theta(x)] for x in vars_ if theta(x) in self._map}, self.psi)

    def renamed(self, theta: Substitution) -> "Env":
        """Push every binding through Θ (Θ injective on the bound variables)."""
        return Env({theta(x): sem for x, sem in self._items}, self.psi)


@dataclass(frozen=True)
class Bottom:
    """No result: nontermination, a ⊥ scrutinee, or exhausted fuel."""

    fuel_exhausted: bool = False
    reason: str = ""

    def __repr__(self) -> str:
        return "Bottom(fuel)" if self.fuel_exhausted else f"Bottom({self.reason})"


@dataclass(frozen=True)
class Fuel:
    max_unfoldings: int = 64
    max_enumeration: int = 200_000

    def __post_init__(self) -> None:
        if self.max_unfoldings < 1 or self.max_enumeration < 1:
            raise ConfigError("fuel limits must be positive")


@dataclass(frozen=True)
class Domain:
    """Finite value ranges used for enumeration; ψ always ranges over ``{0}``."""

    int_range: Tuple[int, int] = (-128, 127)
    array_max: int = 3
    array_values: Tuple[int, int] = (1, 4)
    array_min: int = 0
    psi_values: Tuple[Any, ...] = field(default=(0,))

    def __post_init__(self) -> None:
        if self.int_range[0] > self.int_range[1] or self.array_values[0] > self.array_values[1]:
            raise ConfigError("domain bounds must be nonempty")
        if self.array_max < self.array_min or self.array_min < 0:
            raise ConfigError("array length bounds must satisfy 0 <= min <= max")

    def describe(self) -> str:
        lo, hi = self.int_range
        alo, ahi = self.array_values
        return f"int:{lo}..{hi} array-len:{self.array_min}..{self.array_max} array-values:{alo}..{ahi}"


def call_args(sig: TypeSig, values: Sequence[Any]) -> Args:
    """Keep values at read and procedure positions, ``None`` at pure outputs."""
    return tuple(v if (arg.io.reads or isinstance(v, ProcSem)) else None for arg, v in zip(sig.args, values))


def written(args: Sequence[ArgSig]) -> Tuple[int, ...]:
    return tuple(i for i, arg in enumerate(args) if arg.io.writes)
