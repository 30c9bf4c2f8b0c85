"""
Program extraction: the program term a proof talks about, rebuilt from its leaves.
"""

from __future__ import annotations

from loguru import logger

from ..errors import NotExtractable
from ..ir.substitution import apply_subst
from ..ir.terms import Cond, Fix, Local, ProcCall, ProcDef, Seq, Term
from .proofs import ProofTree, Rule
from .rules import RULES, ConditionalRule, RuleViolation, _sigma_subst

_LEAVES = frozenset({Rule.AXIOM, Rule.APPLICATION2})
_TRANSPARENT = frozenset(
    {
        Rule.UNDERLYING_LOGIC,
        Rule.UNIVERSAL_QUANTIFICATION,
        Rule.PERMUTATION1,
        Rule.EQUALITY,
        Rule.CORRESPONDENCE,
        Rule.NEW_VARIABLE,
    }
)


def extract_program(tree: ProofTree) -> Term:
    """Rebuild the conclusion's program from the axiom leaves.

    Leaves contribute their own terms; structural rules wrap their premises'
    programs in the matching constructor; renaming, substitution and
    definitional independence apply their substitution to the premise's
    program, which is the same as applying it to every leaf below; the
    remaining rules leave the program unchanged.

    Raises:
        NotExtractable: a leaf carries no term, or a node's shape does not
            match its rule
    """
    term = _extract(tree)
    logger.debug(f"Extracted a program from {sum(1 for _ in tree.nodes())} proof nodes")
    return term


def _one(node: ProofTree) -> Term:
    if len(node.premises) != 1:
        raise NotExtractable(f"{node.name}: {node.rule.value} needs exactly one premise")
    return _extract(node.premises[0])


def _extract(node: ProofTree) -> Term:
    rule = node.rule
    if rule in _LEAVES:
        if node.judgment.term is None:
            raise NotExtractable(f"{node.name}: leaf without a program term")
        return node.judgment.term
    if rule in _TRANSPARENT:
        return _one(node)
    try:
        if rule in (Rule.VARIABLE_RENAMING, Rule.DEFINITIONAL_INDEPENDENCE):
            return apply_subst(_one(node), node.payload["theta"])
        if rule in (Rule.PERMUTATION2, Rule.SUBSTITUTION):
            premise = node.premises[0]
            return apply_subst(_one(node), _sigma_subst(premise.judgment.vars, node.payload["sigma"]))
        if rule == Rule.COMPOSITION:
            first, second = node.premises
            return Seq(_extract(first), _extract(second))
        if rule == Rule.CONDITIONAL:
            rule_impl = RULES[rule]
            assert isinstance(rule_impl, ConditionalRule)
            then, orelse = rule_impl._branches(node, node.premises)
            return Cond(
                node.judgment.vars[0],
                _extract(then) if then is not None else None,
                _extract(orelse) if orelse is not None else None,
            )
        if rule == Rule.OUTPUT_DELETION:
            return Local(node.payload["delete"], _one(node))
        if rule == Rule.PROCEDURE:
            proc, formals = node.payload["proc"]
            return ProcDef(proc, tuple(formals), _one(node))
        if rule == Rule.APPLICATION1:
            body = _one(node)
            if not (isinstance(body, Seq) and isinstance(body.second, ProcCall)):
                raise NotExtractable(f"{node.name}: premise is not a program followed by a call")
            return ProcCall(body.second.proc, body.second.actuals, body.first)
        if rule == Rule.LEAST_FIXPOINT:
            used, defined = node.payload["fix"]
            return Fix(used, defined, _one(node))
    except (KeyError, ValueError, IndexError, RuleViolation) as e:
        raise NotExtractable(f"{node.name}: malformed {rule.value} node ({e})") from None
    raise NotExtractable(f"{node.name}: no extraction for {rule.value}")
