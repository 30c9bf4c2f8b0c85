"""
Proof files (``.plp``): proof trees serialized as s-expressions.

::

    (proof quicksort
      (signatures "quicksort.sig")
      (domain (int 1 4) (array-max 4) (array-values 1 4))
      (fuel (unfoldings 64) (enumeration 600000))
      (models (Quicksort sort_ref bottom sort_pairs))
      (relations quicksort basic)
      (tree
        (Composition P3 (judgment (R3k k) (A p q r Quicksort) _) (prec)
          (Axiom P2 (judgment R_2 (A p q r) "call Partition(A, p, r, q)"))
          (Application2 P1 (judgment (R1k k) (A p q Quicksort) (call Quicksort (A p q)))))))

A node is ``(Rule LABEL (judgment RELATION (VARS) TERM) PAYLOAD... PREMISE...)``.
The term is PL text in quotes, an s-expression term, or ``_`` (or nothing)
to derive it from the premises. Payload entries::

    (prec)  (assumed "label")  (empty then|else)  (delete x)
    (proc p (formals...))  (theta (from to)...)  (sigma (2 1 3))
    (equal 1 2)  (new z)  (fix used defined)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from loguru import logger

from ..errors import ConfigError, PlSyntaxError, UndeclaredIdentifier, UnknownRulePayload
from ..interp.builtins import BUILTINS, BuiltinRegistry
from ..interp.semantics import Domain, Fuel
from ..ir.sexpr import Quoted, SExpr, read_sexprs
from ..ir.substitution import Substitution
from ..ir.terms import PSI, Term, VarId
from ..ir.typesig import ProcKind
from ..parser.parser import parse, term_from_sexpr
from ..parser.signatures import SigEnv
from .checker import CheckReport, Oracle, check_proof
from .library import load_libraries
from .models import build_models
from .proofs import Judgment, ProofTree, Rule
from .relations import Library, relation_from_sexpr

_RULE_NAMES = {r.value: r for r in Rule}
_PAYLOAD_KEYS = frozenset({"prec", "assumed", "empty", "delete", "proc", "theta", "sigma", "equal", "new", "fix"})


@dataclass
class ProofFile:
    """A loaded proof with everything needed to check it."""

    name: str
    tree: ProofTree
    signatures: SigEnv
    domain: Domain = Domain()
    fuel: Fuel = Fuel()
    models: Dict[str, List[Any]] = field(default_factory=dict)
    library: Library = field(default_factory=load_libraries)
    path: Optional[Path] = None

    def oracle(self, domain: Optional[Domain] = None, fuel: Optional[Fuel] = None) -> Oracle:
        return Oracle.brute_force(domain or self.domain, fuel or self.fuel)

    def check(self, oracle: Optional[Oracle] = None, registry: Optional[BuiltinRegistry] = None) -> CheckReport:
        return check_proof(self.tree, oracle or self.oracle(), self.library, self.models, registry or BUILTINS)


class _ProofReader:
    def __init__(self, env: SigEnv):
        self.env = env

    def var(self, item: SExpr) -> VarId:
        name = self._atom(item)
        if name == "psi":
            return PSI
        entry = self.env.get(name)
        if entry is None or entry.role != "var":
            raise UndeclaredIdentifier(f"undeclared variable {name} in proof")
        return entry.var()

    def vars(self, item: SExpr) -> Tuple[VarId, ...]:
        if not isinstance(item, list):
            raise PlSyntaxError(f"expected a variable list, found {item}")
        return tuple(self.var(v) for v in item)

    @staticmethod
    def _atom(item: SExpr) -> str:
        if not isinstance(item, str) or isinstance(item, Quoted):
            raise PlSyntaxError(f"expected a name, found {item}")
        return item

    def term(self, item: SExpr) -> Optional[Term]:
        if isinstance(item, Quoted):
            return parse(item, self.env)
        if isinstance(item, list):
            return term_from_sexpr(item, self.env)
        if item == "_":
            return None
        raise PlSyntaxError(f"expected a program term, found {item}")

    def judgment(self, item: SExpr) -> Judgment:
        if not isinstance(item, list) or len(item) not in (3, 4) or item[0] != "judgment":
            raise PlSyntaxError(f"expected (judgment RELATION (VARS) TERM), found {item}")
        term = self.term(item[3]) if len(item) == 4 else None
        return Judgment(relation_from_sexpr(item[1]), self.vars(item[2]), term)

    def node(self, item: SExpr) -> ProofTree:
        if not isinstance(item, list) or len(item) < 3:
            raise PlSyntaxError(f"expected a proof node, found {item}")
        head = self._atom(item[0])
        if head not in _RULE_NAMES:
            raise UnknownRulePayload(f"unknown rule {head}")
        label = self._atom(item[1])
        judgment = self.judgment(item[2])
        payload: Dict[str, Any] = {}
        premises: List[ProofTree] = []
        for entry in item[3:]:
            if not isinstance(entry, list) or not entry:
                raise PlSyntaxError(f"{label}: expected a payload entry or a premise, found {entry}")
            key = self._atom(entry[0])
            if key in _RULE_NAMES:
                premises.append(self.node(entry))
            elif key in _PAYLOAD_KEYS:
                payload[key] = self.payload(key, entry[1:], label)
            else:
                raise UnknownRulePayload(f"{label}: unknown payload {key}")
        return ProofTree(_RULE_NAMES[head], judgment, tuple(premises), payload, label)

    def payload(self, key: str, args: Sequence[SExpr], label: str) -> Any:
        try:
            if key == "prec":
                return ()
            if key == "assumed":
                return str(args[0])
            if key == "empty":
                branch = self._atom(args[0])
                if branch not in ("then", "else"):
                    raise PlSyntaxError(f"{label}: empty branch must be then or else")
                return branch
            if key in ("delete", "new"):
                return self.var(args[0])
            if key == "proc":
                proc = self.var(args[0])
                if not proc.is_proc:
                    raise PlSyntaxError(f"{label}: {proc.name} is not a procedure")
                names = [self._atom(a) for a in args[1]] if isinstance(args[1], list) else []
                if len(names) != proc.sig.arity:
                    raise PlSyntaxError(f"{label}: {proc.name} takes {proc.sig.arity} formals")
                return proc, tuple(VarId(n, arg.kind) for n, arg in zip(names, proc.sig.args))
            if key == "theta":
                mapping: Dict[VarId, VarId] = {}
                for pair in args:
                    if not isinstance(pair, list) or len(pair) != 2:
                        raise PlSyntaxError(f"{label}: theta entries are (from to) pairs")
                    source = self.var(pair[0])
                    target = self._target(pair[1], source)
                    mapping[source] = target
                theta = Substitution(mapping)
                theta.validate()
                return theta
            if key == "sigma":
                if not isinstance(args[0], list):
                    raise PlSyntaxError(f"{label}: sigma is a list of positions")
                return tuple(int(self._atom(i)) for i in args[0])
            if key == "equal":
                return int(self._atom(args[0])), int(self._atom(args[1]))
            if key == "fix":
                defined = self.var(args[1])
                used = self._target(args[0], defined)
                return used, defined
        except (IndexError, ValueError) as e:
            raise PlSyntaxError(f"{label}: malformed ({key} ...): {e}") from None
        raise UnknownRulePayload(f"{label}: unknown payload {key}")

    def _target(self, item: SExpr, like: VarId) -> VarId:
        """A declared variable, or a new name of the same kind."""
        name = self._atom(item)
        entry = self.env.get(name)
        return entry.var() if entry is not None and entry.role == "var" else like.renamed(name)


def _sections(items: Sequence[SExpr]) -> Dict[str, List[SExpr]]:
    sections: Dict[str, List[SExpr]] = {}
    for item in items:
        if not isinstance(item, list) or not item or isinstance(item[0], list):
            raise PlSyntaxError(f"expected a (section ...) entry, found {item}")
        head = str(item[0])
        if head in sections:
            raise PlSyntaxError(f"duplicate section {head}")
        sections[head] = item[1:]
    return sections


def _pair(items: Sequence[SExpr], name: str) -> Tuple[int, int]:
    try:
        lo, hi = (int(str(v)) for v in items)
    except ValueError:
        raise PlSyntaxError(f"({name} LOW HIGH) expects two integers") from None
    return lo, hi


def _domain(items: Sequence[SExpr]) -> Domain:
    options: Dict[str, Any] = {}
    for entry in _sections(items).items():
        key, args = entry
        if key == "int":
            options["int_range"] = _pair(args, key)
        elif key == "array-values":
            options["array_values"] = _pair(args, key)
        elif key in ("array-max", "array-min"):
            options[key.replace("-", "_")] = int(str(args[0]))
        else:
            raise PlSyntaxError(f"unknown domain entry {key}")
    try:
        return Domain(**options)
    except ConfigError as e:
        raise PlSyntaxError(f"invalid domain: {e.message}") from None


def _fuel(items: Sequence[SExpr]) -> Fuel:
    names = {"unfoldings": "max_unfoldings", "enumeration": "max_enumeration"}
    options: Dict[str, int] = {}
    for key, args in _sections(items).items():
        if key not in names:
            raise PlSyntaxError(f"unknown fuel entry {key}")
        options[names[key]] = int(str(args[0]))
    return Fuel(**options)


def _signatures(items: Sequence[SExpr], base: Optional[Path]) -> SigEnv:
    env = SigEnv()
    for item in items:
        if isinstance(item, Quoted):
            path = Path(item) if base is None else base / item
            env = env.merged(SigEnv.load(path))
        elif isinstance(item, list) and len(item) == 2 and isinstance(item[1], Quoted):
            env = env.merged(SigEnv.from_mapping({str(item[0]): str(item[1])}))
        else:
            raise PlSyntaxError(f"signatures are file names or (name \"kind\") pairs, found {item}")
    return env


def parse_proof(text: str, base: Optional[Path] = None) -> ProofFile:
    """Read a proof file's text; relative signature paths resolve against ``base``.

    Raises:
        PlSyntaxError: malformed proof structure
        UnknownRulePayload: an unknown rule, payload, relation library or model
    """
    items = read_sexprs(text)
    if len(items) != 1 or not isinstance(items[0], list) or not items[0] or items[0][0] != "proof":
        raise PlSyntaxError("a proof file holds exactly one (proof NAME ...) form")
    form = items[0]
    if len(form) < 2 or isinstance(form[1], list):
        raise PlSyntaxError("the proof needs a name")
    name = str(form[1])
    sections = _sections(form[2:])
    if "tree" not in sections or len(sections["tree"]) != 1:
        raise PlSyntaxError(f"proof {name} needs exactly one (tree NODE)")
    env = _signatures(sections.get("signatures", []), base)
    reader = _ProofReader(env)
    tree = reader.node(sections["tree"][0])

    libraries = [str(n) for n in sections.get("relations", [])]
    library = load_libraries(*libraries)

    wanted: Dict[str, List[str]] = {}
    for entry in sections.get("models", []):
        if not isinstance(entry, list) or not entry:
            raise PlSyntaxError(f"models are (PROC model...) lists, found {entry}")
        wanted[str(entry[0])] = [str(m) for m in entry[1:]]
    sigs = {e.name: e.kind.sig for e in env if e.role == "var" and isinstance(e.kind, ProcKind)}
    models = build_models(wanted, sigs)

    proof = ProofFile(
        name,
        tree,
        env,
        _domain(sections.get("domain", [])),
        _fuel(sections.get("fuel", [])),
        models,
        library,
    )
    logger.debug(f"Read proof {name} with {sum(1 for _ in tree.nodes())} nodes")
    return proof


def load_proof(path: Union[str, Path]) -> ProofFile:
    """Load a ``.plp`` file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read proof file {path}: {e}") from e
    proof = parse_proof(text, path.parent)
    proof.path = path
    logger.info(f"Loaded proof {proof.name} from {path}")
    return proof
