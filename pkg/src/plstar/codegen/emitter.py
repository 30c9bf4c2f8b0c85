"""
Emission entry point and the two shipped backends.
"""

from __future__ import annotations

from typing import List, Union

from loguru import logger

from ..analysis.preconditions import check_preconditions
from ..errors import PrecondViolation, UnboundFragment, UnboundPrimitive, UnknownBackend
from ..interp.builtins import BUILTINS
from ..ir.substitution import free_vars
from ..ir.terms import Prim, ProcDef, Term, fragment_names, subterms
from ..parser.printer import print_term
from .backends import Backend, EmitUnit, load_bindings, register_backend, registered, registered_ids
from .c_backend import c_harness, render_c


def render_pseudo(term: Term, backend: Backend, name: str) -> EmitUnit:
    entry = name
    defs = [t for t in subterms(term) if isinstance(t, ProcDef)]
    if defs:
        entry = defs[-1].proc.name
    return EmitUnit(f"{name}{backend.bindings.extension}", print_term(term), entry)


def _check_bound(term: Term, backend: Backend) -> None:
    used = {t.name for t in subterms(term) if isinstance(t, Prim)}
    used |= {v.name for v in free_vars(term) if v.is_proc and v.name in BUILTINS}
    missing = sorted(used - set(backend.prim_bindings))
    if missing:
        raise UnboundPrimitive(f"backend {backend.id} has no binding for {', '.join(missing)}")


def install_defaults() -> None:
    """Register the ``c`` and ``pseudo`` backends once."""
    if registered("c") is None:
        register_backend(Backend("c", load_bindings("c"), render_c, c_harness))
    if registered("pseudo") is None:
        register_backend(Backend("pseudo", load_bindings("pseudo"), render_pseudo))


def get_backend(backend_id: str) -> Backend:
    install_defaults()
    backend = registered(backend_id)
    if backend is None:
        raise UnknownBackend(f"unknown backend {backend_id}; available: {', '.join(registered_ids())}")
    return backend


def backend_ids() -> List[str]:
    install_defaults()
    return registered_ids()


def emit(term: Term, backend: Union[str, Backend], name: str = "program") -> EmitUnit:
    """Translate a checked program into one source file of the backend's language.

    Args:
        term: a fragment-free program whose operator preconditions hold
        backend: a backend or a registered backend id
        name: unit name, used for the file name and a wrapper entry point

    Returns:
        The emitted unit; the text depends only on the term, the backend and
        its bindings.

    Raises:
        UnboundFragment: the program still has fragments
        PrecondViolation: the program fails a static precondition
        UnboundPrimitive: a builtin the program uses has no binding
        UnsupportedSort: a variable's sort has no target type
        UnknownBackend: no backend with that id
    """
    if isinstance(backend, str):
        backend = get_backend(backend)
    names = fragment_names(term)
    if names:
        raise UnboundFragment(f"cannot emit a program with fragments {', '.join(sorted(names))}")
    # the unit is listed over its free variables, which become its parameters
    found = check_preconditions(term, listed=free_vars(term))
    if found:
        raise PrecondViolation(f"{len(found)} precondition diagnostics, first: {found[0].message}", found[0].span)
    if backend.bindings.requires_bindings:
        _check_bound(term, backend)
    unit = backend.render(term, backend, name)
    logger.info(f"Emitted {unit.file_name} ({backend.id}, entry {unit.entry})")
    return unit
