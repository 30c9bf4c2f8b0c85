"""
Signature environments: declarations of the free identifiers of a program.

A signature file is TOML with one string per name::

    f = "proc(in int, out int)"
    "=" = "proc(in int, in int, out bool)"
    Update1 = "prim(inout int-array, in int)"
    bump = "prim(inout int) psi=tick"
    X = "frag(in int, out int)"
    A = "int-array"
"""

from __future__ import annotations

import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, Literal, Mapping, Optional, Union

from loguru import logger

from ..errors import ConfigError, IRError
from ..ir.terms import VarId
from ..ir.typesig import DataKind, Kind, ProcKind, Sort, TypeSig, parse_kind, parse_typesig

Role = Literal["var", "prim", "frag"]

_ENTRY = re.compile(r"^\s*(?P<role>prim|frag)(?P<args>\(.*\))\s*(?:psi\s*=\s*(?P<psi>[A-Za-z_][A-Za-z0-9_]*))?\s*$")


@dataclass(frozen=True)
class SigEntry:
    """One declaration: a program variable, a primitive leaf or a fragment variable."""

    name: str
    role: Role
    kind: Kind
    psi_effect: Optional[str] = None

    @property
    def sig(self) -> TypeSig:
        if not isinstance(self.kind, ProcKind):
            raise IRError(f"{self.name} has no procedure signature")
        return self.kind.sig

    def var(self) -> VarId:
        return VarId(self.name, self.kind)


def parse_entry(name: str, text: str) -> SigEntry:
    """Parse the right-hand side of a signature declaration."""
    match = _ENTRY.match(text)
    if match:
        sig = parse_typesig(match.group("args"))
        role: Role = "prim" if match.group("role") == "prim" else "frag"
        return SigEntry(name, role, ProcKind(sig), match.group("psi"))
    if "psi" in text:
        raise IRError(f"{name}: only prim and frag declarations may declare a psi effect")
    return SigEntry(name, "var", parse_kind(text))


class SigEnv:
    """Name-indexed declarations with TOML loading."""

    def __init__(self, entries: Optional[Mapping[str, SigEntry]] = None):
        self._entries: Dict[str, SigEntry] = dict(entries or {})

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Union[str, SigEntry]]) -> "SigEnv":
        entries = {}
        for name, value in mapping.items():
            if name == "psi":
                raise IRError("psi is reserved and cannot be declared")
            entries[name] = value if isinstance(value, SigEntry) else parse_entry(name, value)
        return cls(entries)

    @classmethod
    def from_toml(cls, text: str) -> "SigEnv":
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"invalid signature file: {e}") from e
        bad = [k for k, v in raw.items() if not isinstance(v, str)]
        if bad:
            raise ConfigError(f"signature entries must be strings: {', '.join(bad)}")
        return cls.from_mapping(raw)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "SigEnv":
        path = Path(path)
        logger.debug(f"Loading signatures from {path}")
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read signature file {path}: {e}") from e
        return cls.from_toml(text)

    def merged(self, other: "SigEnv") -> "SigEnv":
        """Entries of ``other`` win on conflicts."""
        return SigEnv({**self._entries, **other._entries})

    def get(self, name: str) -> Optional[SigEntry]:
        return self._entries.get(name)

    def __contains__(self, name: object) -> bool:
        return name in self._entries

    def __iter__(self) -> Iterator[SigEntry]:
        return iter(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    def data_sort(self, name: str, default: Sort = Sort.INT) -> DataKind:
        """Sort of a locally declared name: its declaration when it has one, else ``default``."""
        entry = self._entries.get(name)
        if entry is not None and entry.role == "var" and isinstance(entry.kind, DataKind):
            return entry.kind
        return DataKind(default)
