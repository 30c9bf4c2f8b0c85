"""
Backend registry and primitive binding files.

A backend turns a checked, fragment-free term into one source file. Its
primitive bindings are text templates with ``{1}`` ... ``{n}`` slots, one per
argument of the primitive, read from ``bindings/<backend>.toml``.
"""

from __future__ import annotations

import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Union

from loguru import logger

from ..errors import ConfigError, DuplicateBackend
from ..interp.builtins import BUILTINS, BuiltinRegistry
from ..ir.terms import Term

SLOT = re.compile(r"\{(\d+)\}")


@dataclass(frozen=True)
class EmitUnit:
    file_name: str
    text: str
    entry: str


@dataclass(frozen=True)
class Bindings:
    """Contents of one binding file."""

    extension: str
    prims: Mapping[str, str] = field(default_factory=dict)
    types: Mapping[str, str] = field(default_factory=dict)
    prelude: Mapping[str, str] = field(default_factory=dict)
    requires_bindings: bool = True


Renderer = Callable[[Term, "Backend", str], EmitUnit]
Harness = Callable[[EmitUnit, Term, Sequence[Sequence[Any]]], str]


@dataclass(frozen=True)
class Backend:
    """A target language: how to render terms and how each primitive is spelled."""

    id: str
    bindings: Bindings
    render: Renderer
    harness: Optional[Harness] = None

    @property
    def prim_bindings(self) -> Mapping[str, str]:
        return self.bindings.prims

    @property
    def type_map(self) -> Mapping[str, str]:
        return self.bindings.types

    def instantiate(self, name: str, args: Sequence[str]) -> str:
        """Fill the binding template of ``name`` with argument expressions."""
        template = self.bindings.prims[name]
        return SLOT.sub(lambda m: args[int(m.group(1)) - 1], template)


def slots(template: str) -> List[int]:
    return sorted({int(m.group(1)) for m in SLOT.finditer(template)})


def parse_bindings(text: str, registry: Optional[BuiltinRegistry] = None, origin: str = "<bindings>") -> Bindings:
    """Read a binding file and check every template against its primitive's arity.

    Raises:
        ConfigError: malformed TOML, or a template slot outside 1..arity
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"invalid binding file {origin}: {e}") from e
    registry = registry or BUILTINS
    backend = raw.get("backend", {})
    prims: Dict[str, str] = dict(raw.get("prims", {}))
    for name, template in prims.items():
        if not isinstance(template, str):
            raise ConfigError(f"{origin}: binding of {name} must be a string")
        builtin = registry.lookup(name)
        arity = builtin.sig.arity if builtin is not None else None
        bad = [s for s in slots(template) if s < 1 or (arity is not None and s > arity)]
        if bad:
            raise ConfigError(f"{origin}: binding of {name} uses slots {bad} outside 1..{arity}")
    return Bindings(
        extension=str(backend.get("extension", ".txt")),
        prims=prims,
        types=dict(raw.get("types", {})),
        prelude=dict(raw.get("prelude", {})),
        requires_bindings=bool(backend.get("requires_bindings", True)),
    )


def load_bindings(backend_id: str, path: Union[str, Path, None] = None) -> Bindings:
    """Load ``bindings/<backend_id>.toml`` from the package, or from ``path``."""
    if path is not None:
        source = Path(path)
        try:
            text = source.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read binding file {source}: {e}") from e
        origin = str(source)
    else:
        resource = resources.files("plstar.codegen").joinpath("bindings", f"{backend_id}.toml")
        if not resource.is_file():
            raise ConfigError(f"no binding file for backend {backend_id}")
        text = resource.read_text(encoding="utf-8")
        origin = f"bindings/{backend_id}.toml"
    logger.debug(f"Loading primitive bindings from {origin}")
    return parse_bindings(text, origin=origin)


_REGISTRY: Dict[str, Backend] = {}


def register_backend(backend: Backend) -> None:
    """Make a backend available to ``emit``.

    Raises:
        DuplicateBackend: the id is taken
    """
    if backend.id in _REGISTRY:
        raise DuplicateBackend(f"backend {backend.id} is already registered")
    _REGISTRY[backend.id] = backend
    logger.debug(f"Registered backend {backend.id}")


def registered(backend_id: str) -> Optional[Backend]:
    return _REGISTRY.get(backend_id)


def registered_ids() -> List[str]:
    return sorted(_REGISTRY)
