"""
Sorts, kinds and procedure type signatures.

A signature is a finite tree: every argument of a procedure is either data of
some sort or itself a procedure with its own signature. Text form::

    proc(in int, out int)
    proc(inout int-array, in int, in proc(in int, out int))
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple, Union

from ..errors import IRError


class Sort(str, Enum):
    """Closed set of data sorts."""

    INT = "int"
    BOOL = "bool"
    INT_ARRAY = "int-array"
    UNIT = "unit"
    UNIVERSAL = "universal"


class IO(str, Enum):
    """Direction of a procedure argument."""

    IN = "in"
    OUT = "out"
    INOUT = "inout"

    @property
    def reads(self) -> bool:
        return self in (IO.IN, IO.INOUT)

    @property
    def writes(self) -> bool:
        return self in (IO.OUT, IO.INOUT)

    @staticmethod
    def from_flags(reads: bool, writes: bool) -> "IO":
        if reads and writes:
            return IO.INOUT
        if writes:
            return IO.OUT
        return IO.IN


@dataclass(frozen=True)
class DataKind:
    sort: Sort

    def __str__(self) -> str:
        return self.sort.value


@dataclass(frozen=True)
class ProcKind:
    sig: "TypeSig"

    def __str__(self) -> str:
        return str(self.sig)


Kind = Union[DataKind, ProcKind]


@dataclass(frozen=True)
class ArgSig:
    io: IO
    kind: Kind

    def __str__(self) -> str:
        return f"{self.io.value} {self.kind}"


@dataclass(frozen=True)
class TypeSig:
    """Signature of a procedure variable."""

    args: Tuple[ArgSig, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def at(self, alpha: Sequence[int]) -> ArgSig:
        """Return the argument signature at a 1-based index path."""
        if not alpha:
            raise IRError("empty index sequence")
        sig: TypeSig = self
        arg: ArgSig = sig.args[0]
        for depth, index in enumerate(alpha):
            if index < 1 or index > sig.arity:
                raise IRError(f"index {index} out of range for {sig}")
            arg = sig.args[index - 1]
            if depth < len(alpha) - 1:
                if not isinstance(arg.kind, ProcKind):
                    raise IRError(f"argument {index} of {sig} is not a procedure")
                sig = arg.kind.sig
        return arg

    def flags(self, alpha: Sequence[int]) -> Tuple[bool, bool, bool, bool]:
        """Answer the (in, out, data, proc) query for the argument at alpha."""
        arg = self.at(alpha)
        is_data = isinstance(arg.kind, DataKind)
        return (arg.io.reads, arg.io.writes, is_data, not is_data)

    def __str__(self) -> str:
        return "proc(" + ", ".join(str(a) for a in self.args) + ")"


def data(sort: Union[Sort, str]) -> DataKind:
    return DataKind(Sort(sort))


def proc(*args: Tuple[str, Kind]) -> ProcKind:
    """Shorthand: ``proc(("in", data("int")), ("out", data("int")))``."""
    return ProcKind(TypeSig(tuple(ArgSig(IO(io), kind) for io, kind in args)))


_TOKEN = re.compile(r"\s*(int-array|[A-Za-z_][A-Za-z0-9_]*|[(),=])")


def _tokenize(text: str) -> List[str]:
    tokens: List[str] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise IRError(f"bad signature text near {text[pos:]!r}")
        tokens.append(match.group(1))
        pos = match.end()
    return tokens


class _SigReader:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else ""

    def take(self, expected: str = "") -> str:
        token = self.peek()
        if not token or (expected and token != expected):
            raise IRError(f"expected {expected or 'token'} in signature {self.text!r}")
        self.pos += 1
        return token

    def kind(self) -> Kind:
        token = self.peek()
        if token == "proc":
            self.take()
            return ProcKind(self.arglist())
        try:
            sort = Sort(self.take())
        except ValueError:
            raise IRError(f"unknown sort in signature {self.text!r}") from None
        return DataKind(sort)

    def arglist(self) -> TypeSig:
        self.take("(")
        args: List[ArgSig] = []
        while self.peek() != ")":
            if args:
                self.take(",")
            try:
                io = IO(self.take())
            except ValueError:
                raise IRError(f"expected in/out/inout in {self.text!r}") from None
            args.append(ArgSig(io, self.kind()))
        self.take(")")
        return TypeSig(tuple(args))

    def done(self) -> None:
        if self.pos != len(self.tokens):
            raise IRError(f"trailing text in signature {self.text!r}")


def parse_kind(text: str) -> Kind:
    """Parse ``int`` or ``proc(in int, out int)``."""
    reader = _SigReader(text)
    kind = reader.kind()
    reader.done()
    return kind


def parse_typesig(text: str) -> TypeSig:
    """Parse an argument list such as ``(in int, out bool)``."""
    reader = _SigReader(text)
    sig = reader.arglist()
    reader.done()
    return sig
