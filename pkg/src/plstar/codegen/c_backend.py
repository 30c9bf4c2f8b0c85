"""
C backend.

Every procedure definition becomes a top-level ``void`` function; scalar
outputs are pointer parameters, arrays pass as base pointers and are indexed
from 1 by the binding templates. Locals are hoisted to the top of their
function and ``fix`` is emitted as its body with the used procedure renamed
to the defined one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

from ..analysis.varsets import var_sets
from ..errors import UnboundFragment, UnboundPrimitive, UnsupportedConstruct, UnsupportedSort
from ..interp.builtins import BUILTINS
from ..interp.evaluator import find_definition
from ..ir.substitution import Substitution, apply_subst, free_vars
from ..ir.terms import Cond, Fix, Fragment, Local, Pad, Prim, ProcCall, ProcDef, Seq, Term, VarId, seq, subterms
from ..ir.typesig import ArgSig, DataKind, ProcKind, Sort, TypeSig
from .backends import Backend, EmitUnit

INDENT = "    "
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_KEYWORDS = frozenset(
    """auto break case char const continue default do double else enum extern float for goto if inline int long
    register restrict return short signed sizeof static struct switch typedef union unsigned void volatile while
    main""".split()
)


def c_name(name: str) -> str:
    """Legal identifiers pass through; anything else is ``pl_``-prefixed with hex escapes."""
    if _IDENT.match(name) and name not in _KEYWORDS and not name.startswith("pl_"):
        return name
    escaped = "".join(ch if ch.isalnum() else f"_x{ord(ch):02x}" for ch in name)
    return f"pl_{escaped}"


def _is_array(kind: Any) -> bool:
    return isinstance(kind, DataKind) and kind.sort == Sort.INT_ARRAY


@dataclass
class _Frame:
    """Expressions for the variables visible in one C function."""

    pointers: Set[VarId] = field(default_factory=set)

    def value(self, var: VarId) -> str:
        return f"(*{c_name(var.name)})" if var in self.pointers else c_name(var.name)

    def address(self, var: VarId) -> str:
        return c_name(var.name) if var in self.pointers else f"&{c_name(var.name)}"


@dataclass
class _Function:
    name: str
    params: List[Tuple[VarId, bool]]  # variable, passed by pointer
    body: Optional[Term]


class CEmitter:
    def __init__(self, backend: Backend):
        self.backend = backend
        self.functions: List[_Function] = []
        self.defined: Dict[str, TypeSig] = {}
        self.externs: Dict[str, TypeSig] = {}
        self.used_prims: List[str] = []

    # lifting

    def lift(self, term: Optional[Term]) -> Optional[Term]:
        """Move every procedure definition out of ``term``; return what is left."""
        if term is None:
            return None
        if isinstance(term, ProcDef):
            index = len(self.functions)
            self.functions.append(_Function(term.proc.name, [], None))
            self.defined[term.proc.name] = term.proc.sig
            body = self.lift(term.body)
            captured = sorted(
                v.name for v in free_vars(body) - set(term.formals) if v.is_data and not v.is_psi
            )
            if captured:
                raise UnsupportedConstruct(f"procedure {term.proc.name} captures data variables {', '.join(captured)}")
            params = [(f, self._by_pointer(arg)) for f, arg in zip(term.formals, term.proc.sig.args)]
            self.functions[index] = _Function(term.proc.name, params, body)
            return None
        if isinstance(term, Seq):
            return seq(self.lift(term.first), self.lift(term.second))
        if isinstance(term, Local):
            body = self.lift(term.body)
            return Local(term.var, body) if body is not None else None
        if isinstance(term, Fix):
            return self.lift(apply_subst(term.body, Substitution({term.used: term.defined})))
        if isinstance(term, Pad):
            return self.lift(term.body)
        if isinstance(term, ProcCall) and term.prefix is not None:
            return seq(self.lift(term.prefix), ProcCall(term.proc, term.actuals))
        if any(isinstance(node, ProcDef) for node in subterms(term)):
            raise UnsupportedConstruct("procedure definitions are only supported at statement level")
        return term

    @staticmethod
    def _by_pointer(arg: ArgSig) -> bool:
        if isinstance(arg.kind, ProcKind):
            raise UnsupportedConstruct(f"procedure-valued parameters ({arg}) have no C form here")
        return _is_array(arg.kind) or arg.io.writes

    @staticmethod
    def _locals(term: Optional[Term]) -> Set[VarId]:
        found: Set[VarId] = set()
        stack = [term]
        while stack:
            node = stack.pop()
            if node is None:
                continue
            if isinstance(node, Local):
                found.add(node.var)
            stack.extend(_children(node))
        return found

    # rendering

    def c_type(self, var: VarId) -> str:
        if not var.is_data:
            raise UnsupportedConstruct(f"{var.name} is a procedure variable")
        sort = var.sort.value
        if sort not in self.backend.type_map:
            raise UnsupportedSort(f"backend {self.backend.id} has no type for sort {sort}")
        return self.backend.type_map[sort]

    def _param(self, var: VarId, pointer: bool) -> str:
        base = self.c_type(var)
        name = c_name(var.name)
        if base.endswith("*"):
            return f"{base}{name}"
        return f"{base} *{name}" if pointer else f"{base} {name}"

    def signature(self, function: _Function) -> str:
        params = ", ".join(self._param(v, p) for v, p in function.params) or "void"
        return f"void {c_name(function.name)}({params})"

    def _prototype(self, name: str, sig: TypeSig) -> str:
        params = []
        for arg in sig.args:
            if isinstance(arg.kind, ProcKind):
                raise UnsupportedConstruct(f"{name} takes a procedure argument")
            base = self.backend.type_map.get(arg.kind.sort.value)
            if base is None:
                raise UnsupportedSort(f"backend {self.backend.id} has no type for sort {arg.kind.sort.value}")
            params.append(base if base.endswith("*") or not arg.io.writes else f"{base} *")
        return f"void {c_name(name)}({', '.join(params) or 'void'})"

    def declarations(self, body: Optional[Term], params: Sequence[VarId]) -> List[str]:
        by_type: Dict[str, List[str]] = {}
        seen: Set[str] = set()
        formals = {v.name for v in params}
        for var in _locals_in_order(body):
            if var.name in formals:
                raise UnsupportedConstruct(f"local {var.name} shadows a parameter")
            if _is_array(var.kind):
                raise UnsupportedSort(f"local array {var.name} has no storage in the C backend")
            if var.name in seen:
                continue
            seen.add(var.name)
            by_type.setdefault(self.c_type(var), []).append(c_name(var.name))
        return [f"{ctype} {', '.join(names)};" for ctype, names in by_type.items()]

    def function(self, function: _Function) -> List[str]:
        frame = _Frame({v for v, pointer in function.params if pointer and not _is_array(v.kind)})
        lines = [self.signature(function), "{"]
        lines += [INDENT + d for d in self.declarations(function.body, [v for v, _ in function.params])]
        lines += [INDENT + s for s in self.statements(function.body, frame)]
        return lines + ["}"]

    def statements(self, term: Optional[Term], frame: _Frame) -> List[str]:
        if term is None:
            return []
        if isinstance(term, Seq):
            return self.statements(term.first, frame) + self.statements(term.second, frame)
        if isinstance(term, (Local, Pad)):
            return self.statements(term.body, frame)
        if isinstance(term, Cond):
            test = frame.value(term.var)
            if term.then is None:
                return [f"if (!{test}) {{"] + _indented(self.statements(term.orelse, frame)) + ["}"]
            lines = [f"if ({test}) {{"] + _indented(self.statements(term.then, frame))
            if term.orelse is not None:
                lines += ["} else {"] + _indented(self.statements(term.orelse, frame))
            return lines + ["}"]
        if isinstance(term, Prim):
            return [self.template(term.name, [v for v in term.vars if not v.is_psi], frame)]
        if isinstance(term, ProcCall):
            return self.statements(term.prefix, frame) + [self.call(term, frame)]
        if isinstance(term, Fix):
            return self.statements(apply_subst(term.body, Substitution({term.used: term.defined})), frame)
        if isinstance(term, Fragment):
            raise UnboundFragment(f"fragment {term.name} cannot be emitted")
        raise UnsupportedConstruct(f"cannot emit {type(term).__name__} here")

    def template(self, name: str, actuals: Sequence[VarId], frame: _Frame) -> str:
        if name not in self.backend.prim_bindings:
            raise UnboundPrimitive(f"backend {self.backend.id} has no binding for {name}")
        if name not in self.used_prims:
            self.used_prims.append(name)
        return self.backend.instantiate(name, [frame.value(v) for v in actuals])

    def call(self, term: ProcCall, frame: _Frame) -> str:
        name = term.proc.name
        actuals = [v for v in term.actuals if not v.is_psi]
        if name not in self.defined:
            if name in self.backend.prim_bindings:
                return self.template(name, actuals, frame)
            if name in BUILTINS:
                raise UnboundPrimitive(f"backend {self.backend.id} has no binding for {name}")
            self.externs.setdefault(name, term.proc.sig)
        args = []
        for var, arg in zip(actuals, term.proc.sig.args):
            if _is_array(arg.kind):
                args.append(c_name(var.name))
            elif arg.io.writes:
                args.append(frame.address(var))
            else:
                args.append(frame.value(var))
        return f"{c_name(name)}({', '.join(args)});"


def _children(term: Term) -> Tuple[Term, ...]:
    if isinstance(term, Seq):
        return (term.first, term.second)
    if isinstance(term, Cond):
        return tuple(t for t in (term.then, term.orelse) if t is not None)
    if isinstance(term, (Local, ProcDef, Fix, Pad)):
        return (term.body,)
    if isinstance(term, ProcCall) and term.prefix is not None:
        return (term.prefix,)
    return ()


def _locals_in_order(term: Optional[Term]) -> List[VarId]:
    if term is None:
        return []
    own = [term.var] if isinstance(term, Local) else []
    return own + [v for child in _children(term) for v in _locals_in_order(child)]


def _indented(lines: List[str]) -> List[str]:
    return [INDENT + line for line in lines]


def render_c(term: Term, backend: Backend, name: str) -> EmitUnit:
    emitter = CEmitter(backend)
    residual = emitter.lift(term)
    if residual is not None:
        sets = var_sets(residual)
        params = sorted(
            (v for v in free_vars(residual) - emitter._locals(residual) if v.is_data and not v.is_psi),
            key=lambda v: v.name,
        )
        emitter.functions.append(
            _Function(name, [(v, _is_array(v.kind) or v in sets.outputs) for v in params], residual)
        )
    if not emitter.functions:
        raise UnsupportedConstruct("nothing to emit")
    entry = emitter.functions[-1].name if residual is None else name

    bodies: List[str] = []
    for function in emitter.functions:
        bodies += [""] + emitter.function(function)

    lines = [f"/* {name}: generated by plstar */"]
    preludes = [backend.bindings.prelude[p] for p in emitter.used_prims if p in backend.bindings.prelude]
    for text in preludes:
        lines += [""] + text.strip("\n").splitlines()
    if emitter.externs:
        lines.append("")
        lines += [f"extern {emitter._prototype(n, s)};" for n, s in sorted(emitter.externs.items())]
    lines.append("")
    lines += [emitter.signature(f) + ";" for f in emitter.functions]
    lines += bodies
    return EmitUnit(f"{name}{backend.bindings.extension}", "\n".join(lines) + "\n", entry)


def _literal(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    return str(value)


def c_harness(unit: EmitUnit, term: Term, vectors: Sequence[Sequence[Any]]) -> str:
    """A ``main`` that calls the entry on every vector and prints each written parameter."""
    definition = find_definition(term, unit.entry)
    if definition is None:
        raise UnsupportedConstruct(f"entry {unit.entry} is not a procedure of the program")
    formals, sig = definition.formals, definition.proc.sig
    lines = [
        "#include <stdio.h>",
        "",
        "static void pl_show_int(const char *name, int value)",
        "{",
        '    printf("%s = %d\\n", name, value);',
        "}",
        "",
        "static void pl_show_array(const char *name, const int *a, int n)",
        "{",
        "    int i;",
        '    printf("%s = [", name);',
        "    for (i = 0; i < n; i++) {",
        '        printf(i ? ", %d" : "%d", a[i]);',
        "    }",
        '    printf("]\\n");',
        "}",
        "",
        "int main(void)",
        "{",
    ]
    for vector in vectors:
        inputs = iter(vector)
        decls: List[str] = []
        args: List[str] = []
        shows: List[str] = []
        for formal, arg in zip(formals, sig.args):
            value = next(inputs) if arg.io.reads else None
            name = c_name(formal.name)
            if _is_array(arg.kind):
                items = list(value or ())
                size = max(len(items), 1)
                init = ", ".join(_literal(v) for v in items) or "0"
                decls.append(f"int {name}[{size}] = {{{init}}};")
                args.append(name)
                if arg.io.writes:
                    shows.append(f'pl_show_array("{formal.name}", {name}, {len(items)});')
            else:
                decls.append(f"int {name} = {_literal(value) if value is not None else 0};")
                args.append(f"&{name}" if arg.io.writes else name)
                if arg.io.writes:
                    shows.append(f'pl_show_int("{formal.name}", {name});')
        block = decls + [f"{c_name(unit.entry)}({', '.join(args)});"] + shows + ['printf("--\\n");']
        lines += [INDENT + "{"] + [INDENT * 2 + s for s in block] + [INDENT + "}"]
    lines += [INDENT + "return 0;", "}"]
    return "\n".join(lines) + "\n"
