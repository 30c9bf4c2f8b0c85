"""Code generation: backends, emission and differential testing."""

from .backends import Backend, Bindings, EmitUnit, load_bindings, parse_bindings, register_backend
from .c_backend import c_harness, c_name, render_c
from .crosscheck import CrossReport, Mismatch, crosscheck, find_compiler
from .emitter import backend_ids, emit, get_backend, install_defaults, render_pseudo

__all__ = [
    "Backend",
    "Bindings",
    "EmitUnit",
    "load_bindings",
    "parse_bindings",
    "register_backend",
    "c_harness",
    "c_name",
    "render_c",
    "CrossReport",
    "Mismatch",
    "crosscheck",
    "find_compiler",
    "backend_ids",
    "emit",
    "get_backend",
    "install_defaults",
    "render_pseudo",
]
