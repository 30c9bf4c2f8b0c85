"""
Proof trees: judgments ``R^L([x]P)`` connected by inference rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterator, Mapping, Optional, Tuple

from ..errors import UnknownRulePayload
from ..ir.terms import Term, VarId, check_psi_last
from .relations import RelExpr


class Rule(str, Enum):
    UNDERLYING_LOGIC = "UnderlyingLogic"
    UNIVERSAL_QUANTIFICATION = "UniversalQuantification"
    VARIABLE_RENAMING = "VariableRenaming"
    PERMUTATION1 = "Permutation1"
    PERMUTATION2 = "Permutation2"
    EQUALITY = "Equality"
    SUBSTITUTION = "Substitution"
    CORRESPONDENCE = "Correspondence"
    DEFINITIONAL_INDEPENDENCE = "DefinitionalIndependence"
    NEW_VARIABLE = "NewVariable"
    COMPOSITION = "Composition"
    CONDITIONAL = "Conditional"
    OUTPUT_DELETION = "OutputDeletion"
    PROCEDURE = "Procedure"
    APPLICATION1 = "Application1"
    APPLICATION2 = "Application2"
    LEAST_FIXPOINT = "LeastFixpoint"
    AXIOM = "Axiom"


# payload keys each rule understands; "assumed" is accepted everywhere
RULE_PAYLOADS: Mapping[Rule, FrozenSet[str]] = {
    Rule.UNDERLYING_LOGIC: frozenset(),
    Rule.UNIVERSAL_QUANTIFICATION: frozenset(),
    Rule.VARIABLE_RENAMING: frozenset({"theta"}),
    Rule.PERMUTATION1: frozenset({"sigma"}),
    Rule.PERMUTATION2: frozenset({"sigma"}),
    Rule.EQUALITY: frozenset({"equal"}),
    Rule.SUBSTITUTION: frozenset({"sigma"}),
    Rule.CORRESPONDENCE: frozenset(),
    Rule.DEFINITIONAL_INDEPENDENCE: frozenset({"theta"}),
    Rule.NEW_VARIABLE: frozenset({"new"}),
    Rule.COMPOSITION: frozenset({"prec"}),
    Rule.CONDITIONAL: frozenset({"empty"}),
    Rule.OUTPUT_DELETION: frozenset({"delete"}),
    Rule.PROCEDURE: frozenset({"proc"}),
    Rule.APPLICATION1: frozenset(),
    Rule.APPLICATION2: frozenset(),
    Rule.LEAST_FIXPOINT: frozenset({"fix"}),
    Rule.AXIOM: frozenset(),
}


@dataclass(frozen=True)
class Judgment:
    """``R^L([vars]term)``; a ``None`` term is derived from the premises."""

    relation: RelExpr
    vars: Tuple[VarId, ...]
    term: Optional[Term] = None

    def __post_init__(self) -> None:
        check_psi_last(self.vars)

    def with_term(self, term: Term) -> "Judgment":
        return replace(self, term=term)


@dataclass(frozen=True, eq=False)
class ProofTree:
    """One rule application: conclusion, rule-specific payload and premise subtrees."""

    rule: Rule
    judgment: Judgment
    premises: Tuple["ProofTree", ...] = ()
    payload: Dict[str, Any] = field(default_factory=dict)
    label: str = ""

    def __post_init__(self) -> None:
        unknown = set(self.payload) - RULE_PAYLOADS[self.rule] - {"assumed"}
        if unknown:
            raise UnknownRulePayload(f"{self.rule.value} does not take payload {', '.join(sorted(unknown))}")

    @property
    def name(self) -> str:
        return self.label or self.rule.value

    @property
    def assumed(self) -> Optional[str]:
        return self.payload.get("assumed")

    def nodes(self) -> Iterator["ProofTree"]:
        """Pre-order traversal."""
        yield self
        for premise in self.premises:
            yield from premise.nodes()

    def replaced(self, old: "ProofTree", new: "ProofTree") -> "ProofTree":
        """A copy of the tree with the node ``old`` (by identity) swapped for ``new``."""
        if self is old:
            return new
        premises = tuple(p.replaced(old, new) for p in self.premises)
        if all(a is b for a, b in zip(premises, self.premises)):
            return self
        return replace(self, premises=premises)
