"""
Inference rules: premise arity, payload, derived conclusion term and side conditions.

Each rule checks its syntactic side conditions exactly and hands every
semantic premise to the checker as an obligation, which the oracle then
discharges by enumeration or by assumption.
"""

from __future__ import annotations

from collections import defaultdict
from itertools import combinations
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, Optional, Sequence, Tuple

from ..analysis.diagnostics import DiagnosticCode
from ..analysis.preconditions import check_preconditions, check_subst
from ..analysis.varsets import var_sets
from ..ir.substitution import Substitution, alpha_equal, apply_subst, free_vars
from ..ir.terms import Cond, Fix, Local, ProcCall, ProcDef, Seq, Term, VarId, occurring_vars
from ..ir.typesig import Sort
from ..interp.semantics import Bottom, DataSem
from .holds import CounterExample, Unknown, Valid, Verdict, select
from .proofs import Judgment, ProofTree, Rule
from .relations import ExistsAt, ForAll, Inconclusive, ProcRelation, RelExpr, Select, WithEquality

if TYPE_CHECKING:
    from .checker import Checker


class RuleViolation(Exception):
    def __init__(self, code: DiagnosticCode, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def require(condition: bool, code: DiagnosticCode, message: str) -> None:
    if not condition:
        raise RuleViolation(code, message)


def same_term(left: Optional[Term], right: Optional[Term]) -> bool:
    if left is None or right is None:
        return left is right
    return left == right or alpha_equal(left, right)


def _names(vars_: Sequence[VarId]) -> str:
    return "[" + ", ".join(v.name for v in vars_) + "]"


def _no_preconditions(term: Term, listed: Sequence[VarId]) -> None:
    found = check_preconditions(term, listed=listed)
    if found:
        raise RuleViolation(found[0].code, f"derived term violates a precondition: {found[0].message}")


def _legal(found: Sequence[Any]) -> None:
    if found:
        raise RuleViolation(found[0].code, found[0].message)


def _sigma_subst(vars_: Sequence[VarId], sigma: Sequence[int]) -> Substitution:
    """Θ with ``x_i ↦ x_σ(i)``."""
    require(len(sigma) == len(vars_), DiagnosticCode.ARITY_MISMATCH, f"σ has {len(sigma)} entries for {len(vars_)} variables")
    require(
        all(1 <= s <= len(vars_) for s in sigma), DiagnosticCode.ARITY_MISMATCH, f"σ = {tuple(sigma)} leaves 1..{len(vars_)}"
    )
    mapping: Dict[VarId, VarId] = {}
    for var, target in zip(vars_, sigma):
        image = vars_[target - 1]
        require(
            mapping.get(var, image) == image,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"σ sends {var.name} to both {mapping.get(var, image).name} and {image.name}",
        )
        mapping[var] = image
    return Substitution(mapping)


class InferenceRule:
    rule: Rule
    min_premises = 0
    max_premises = 0
    required: Tuple[str, ...] = ()
    needs_term = False

    def bindings(self, node: ProofTree) -> List[Dict[str, int]]:
        return [{}]

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        return None

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        raise NotImplementedError


class _SameProgram(InferenceRule):
    """Rules whose conclusion talks about the premise's program."""

    min_premises = max_premises = 1

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        return premises[0].term


class AxiomRule(InferenceRule):
    rule = Rule.AXIOM
    needs_term = True

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        checker.obligation(node, "axiom holds", lambda: checker.holds(node.judgment, term))


class UnderlyingLogicRule(_SameProgram):
    rule = Rule.UNDERLYING_LOGIC

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        premise = premises[0]
        require(
            premise.vars == node.judgment.vars,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"variable list changed from {_names(premise.vars)} to {_names(node.judgment.vars)}",
        )
        checker.obligation(
            node,
            f"{premise.relation} implies {node.judgment.relation}",
            lambda: checker.implication(premise.relation, node.judgment.relation, node.judgment.vars, term),
        )


class UniversalQuantificationRule(_SameProgram):
    rule = Rule.UNIVERSAL_QUANTIFICATION

    def bindings(self, node: ProofTree) -> List[Dict[str, int]]:
        relation = node.judgment.relation
        require(isinstance(relation, ForAll), DiagnosticCode.RELATION_MISMATCH, "conclusion must be a forall relation")
        assert isinstance(relation, ForAll)
        require(relation.low <= relation.high, DiagnosticCode.RELATION_MISMATCH, "empty quantifier range")
        return [{relation.var: k} for k in range(relation.low, relation.high + 1)]

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        relation = node.judgment.relation
        assert isinstance(relation, ForAll)
        premise = premises[0]
        require(premise.vars == node.judgment.vars, DiagnosticCode.VAR_LIST_MISMATCH, "variable list changed")
        require(
            checker.equivalent(relation.body, premise.relation),
            DiagnosticCode.RELATION_MISMATCH,
            f"{relation} does not quantify the premise relation {premise.relation}",
        )


class VariableRenamingRule(_SameProgram):
    rule = Rule.VARIABLE_RENAMING
    required = ("theta",)

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        assert premises[0].term is not None
        return apply_subst(premises[0].term, node.payload["theta"])

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        theta: Substitution = node.payload["theta"]
        premise = premises[0]
        assert premise.term is not None
        universe = occurring_vars(premise.term) | set(premise.vars)
        require(theta.is_injective_on(universe), DiagnosticCode.NOT_OUTPUT_INJECTIVE, "renaming identifies variables")
        clashes = sorted(v.name for v in theta.image_of(theta.domain & universe) & (universe - theta.domain))
        require(not clashes, DiagnosticCode.VAR_LIST_MISMATCH, f"renaming captures {', '.join(clashes)}")
        _legal(check_subst(premise.term, theta))
        expected = tuple(theta(v) for v in premise.vars)
        require(
            node.judgment.vars == expected,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"expected variables {_names(expected)}, found {_names(node.judgment.vars)}",
        )
        require(
            checker.equivalent(node.judgment.relation, premise.relation),
            DiagnosticCode.RELATION_MISMATCH,
            "renaming keeps the relation",
        )


class Permutation1Rule(_SameProgram):
    """Reorder the variable list: ``R^L([x]P) ⊢ Rσ^L([z]P)`` with ``z_σ(i) = x_i``."""

    rule = Rule.PERMUTATION1
    required = ("sigma",)

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        sigma: Tuple[int, ...] = node.payload["sigma"]
        premise = premises[0]
        n = len(premise.vars)
        require(sorted(sigma) == list(range(1, n + 1)), DiagnosticCode.ARITY_MISMATCH, f"{sigma} is not a permutation of 1..{n}")
        expected: List[Optional[VarId]] = [None] * n
        for i, target in enumerate(sigma):
            expected[target - 1] = premise.vars[i]
        require(
            tuple(expected) == node.judgment.vars,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"expected variables {_names(expected)}, found {_names(node.judgment.vars)}",  # type: ignore[arg-type]
        )
        require(
            checker.equivalent(node.judgment.relation, Select(premise.relation, sigma, n)),
            DiagnosticCode.RELATION_MISMATCH,
            f"conclusion relation must be the premise relation permuted by {sigma}",
        )


class Permutation2Rule(_SameProgram):
    """Permute the program's variables: ``R^L([x]P(x)) ⊢ Rσ^L([x]P(σ(x)))``."""

    rule = Rule.PERMUTATION2
    required = ("sigma",)

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        premise = premises[0]
        assert premise.term is not None
        return apply_subst(premise.term, _sigma_subst(premise.vars, node.payload["sigma"]))

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        sigma: Tuple[int, ...] = node.payload["sigma"]
        premise = premises[0]
        n = len(premise.vars)
        require(sorted(sigma) == list(range(1, n + 1)), DiagnosticCode.ARITY_MISMATCH, f"{sigma} is not a permutation of 1..{n}")
        require(len(set(premise.vars)) == n, DiagnosticCode.VAR_LIST_MISMATCH, "permuted variables must be distinct")
        assert premise.term is not None
        _legal(check_subst(premise.term, _sigma_subst(premise.vars, sigma)))
        require(premise.vars == node.judgment.vars, DiagnosticCode.VAR_LIST_MISMATCH, "variable list changed")
        require(
            checker.equivalent(node.judgment.relation, Select(premise.relation, sigma, n)),
            DiagnosticCode.RELATION_MISMATCH,
            f"conclusion relation must be the premise relation permuted by {sigma}",
        )


class EqualityRule(_SameProgram):
    rule = Rule.EQUALITY
    required = ("equal",)

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        i, j = node.payload["equal"]
        premise = premises[0]
        n = len(premise.vars)
        require(1 <= i <= n and 1 <= j <= n, DiagnosticCode.ARITY_MISMATCH, f"positions {i}, {j} outside 1..{n}")
        require(
            premise.vars[i - 1] == premise.vars[j - 1],
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"positions {i} and {j} hold different variables",
        )
        require(premise.vars == node.judgment.vars, DiagnosticCode.VAR_LIST_MISMATCH, "variable list changed")
        require(
            checker.equivalent(node.judgment.relation, WithEquality(premise.relation, i, j)),
            DiagnosticCode.RELATION_MISMATCH,
            f"conclusion relation must add equality of positions {i} and {j}",
        )


class SubstitutionRule(_SameProgram):
    """``R^L([x]P(x)) ⊢ Rσ^L([x]P(σ(x)))`` for σ that keeps data variables apart."""

    rule = Rule.SUBSTITUTION
    required = ("sigma",)

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        premise = premises[0]
        assert premise.term is not None
        return apply_subst(premise.term, _sigma_subst(premise.vars, node.payload["sigma"]))

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        sigma: Tuple[int, ...] = node.payload["sigma"]
        premise = premises[0]
        theta = _sigma_subst(premise.vars, sigma)
        data = sorted({v for v in premise.vars if v.is_data}, key=lambda v: v.name)
        for a, b in combinations(data, 2):
            require(
                theta(a) != theta(b), DiagnosticCode.DATA_IDENTIFIED, f"σ identifies data variables {a.name} and {b.name}"
            )
        assert premise.term is not None
        _legal(check_subst(premise.term, theta))
        require(premise.vars == node.judgment.vars, DiagnosticCode.VAR_LIST_MISMATCH, "variable list changed")
        require(
            checker.equivalent(node.judgment.relation, Select(premise.relation, sigma, len(sigma))),
            DiagnosticCode.RELATION_MISMATCH,
            f"conclusion relation must be the premise relation under σ = {sigma}",
        )


class CorrespondenceRule(_SameProgram):
    rule = Rule.CORRESPONDENCE

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        premise = premises[0]
        both = tuple(dict.fromkeys(v for v in premise.vars + node.judgment.vars if not v.is_psi))
        if any(v.is_psi for v in premise.vars + node.judgment.vars):
            both = both + tuple(v for v in premise.vars if v.is_psi)[:1]
        checker.obligation(
            node,
            f"{premise.relation} on {_names(premise.vars)} carries over to {_names(node.judgment.vars)}",
            lambda: checker.transfer(premise, node.judgment, both, term),
        )


class DefinitionalIndependenceRule(_SameProgram):
    rule = Rule.DEFINITIONAL_INDEPENDENCE
    required = ("theta",)

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        assert premises[0].term is not None
        return apply_subst(premises[0].term, node.payload["theta"])

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        theta: Substitution = node.payload["theta"]
        premise = premises[0]
        assert premise.term is not None
        _legal(check_subst(premise.term, theta))
        expected = tuple(theta(v) for v in premise.vars)
        require(
            node.judgment.vars == expected,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"expected variables {_names(expected)}, found {_names(node.judgment.vars)}",
        )
        require(
            checker.equivalent(node.judgment.relation, premise.relation),
            DiagnosticCode.RELATION_MISMATCH,
            "definitional independence keeps the relation",
        )


class NewVariableRule(_SameProgram):
    rule = Rule.NEW_VARIABLE
    required = ("new",)

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        new: VarId = node.payload["new"]
        premise = premises[0]
        require(new.is_data and not new.is_psi, DiagnosticCode.KIND_MISMATCH, f"{new.name} must be a data variable")
        require(
            new not in occurring_vars(term) and new not in premise.vars,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"{new.name} is not new",
        )
        plain = [v for v in premise.vars if not v.is_psi]
        psi = [v for v in premise.vars if v.is_psi]
        expected = tuple(plain + [new] + psi)
        require(
            node.judgment.vars == expected,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"expected variables {_names(expected)}, found {_names(node.judgment.vars)}",
        )
        checker.obligation(node, "relation holds with the new variable", lambda: checker.holds(node.judgment, term))


class CompositionRule(InferenceRule):
    rule = Rule.COMPOSITION
    min_premises = max_premises = 2
    required = ("prec",)

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        first, second = premises
        assert first.term is not None and second.term is not None
        return Seq(first.term, second.term)

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        first, second = premises
        expected = set(first.vars) | set(second.vars)
        require(
            set(node.judgment.vars) == expected,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"conclusion lists {_names(node.judgment.vars)}, premises list {_names(sorted(expected, key=lambda v: v.name))}",
        )
        _no_preconditions(term, node.judgment.vars)
        checker.obligation(
            node,
            f"{first.relation} and {second.relation} compose to {node.judgment.relation}",
            lambda: checker.composition(first, second, node.judgment, term),
        )


class ConditionalRule(InferenceRule):
    rule = Rule.CONDITIONAL
    min_premises = 1
    max_premises = 2

    def _branches(self, node: ProofTree, premises: Sequence[Any]) -> Tuple[Optional[Any], Optional[Any]]:
        if len(premises) == 2:
            return premises[0], premises[1]
        if node.payload.get("empty") == "then":
            return None, premises[0]
        return premises[0], None

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        then, orelse = self._branches(node, premises)
        require(bool(node.judgment.vars), DiagnosticCode.VAR_LIST_MISMATCH, "the condition variable must come first")
        return Cond(node.judgment.vars[0], then.term if then else None, orelse.term if orelse else None)

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        x = node.judgment.vars[0]
        require(x.is_data and x.sort == Sort.BOOL, DiagnosticCode.SCRUTINEE_NOT_DATA, f"{x.name} is not a bool variable")
        then, orelse = self._branches(node, premises)
        for branch in (then, orelse):
            if branch is not None:
                outside = sorted(v.name for v in branch.vars if not v.is_psi and v not in free_vars(branch.term))
                require(
                    not outside,
                    DiagnosticCode.VAR_LIST_MISMATCH,
                    f"branch variables {', '.join(outside)} are not free in the branch",
                )
        expected = {x} | set(then.vars if then else ()) | set(orelse.vars if orelse else ())
        require(
            set(node.judgment.vars) == expected,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"conclusion lists {_names(node.judgment.vars)}",
        )
        _no_preconditions(term, node.judgment.vars)
        checker.obligation(
            node, "branch relations imply the conclusion", lambda: checker.conditional(then, orelse, node.judgment, term)
        )


class OutputDeletionRule(InferenceRule):
    rule = Rule.OUTPUT_DELETION
    min_premises = max_premises = 1
    required = ("delete",)

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        assert premises[0].term is not None
        return Local(node.payload["delete"], premises[0].term)

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        deleted: VarId = node.payload["delete"]
        premise = premises[0]
        require(
            premise.vars.count(deleted) == 1,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"{deleted.name} must occur exactly once in {_names(premise.vars)}",
        )
        position = premise.vars.index(deleted) + 1
        expected = tuple(v for v in premise.vars if v != deleted)
        require(
            node.judgment.vars == expected,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"expected variables {_names(expected)}, found {_names(node.judgment.vars)}",
        )
        _no_preconditions(term, node.judgment.vars)
        sort = deleted.sort if deleted.is_data else None
        if sort is not None and checker.equivalent(node.judgment.relation, ExistsAt(premise.relation, position, sort)):
            return
        checker.obligation(
            node, f"conclusion follows from deleting {deleted.name}", lambda: checker.holds(node.judgment, term)
        )


class ProcedureRule(InferenceRule):
    rule = Rule.PROCEDURE
    min_premises = max_premises = 1
    required = ("proc",)

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        proc, formals = node.payload["proc"]
        assert premises[0].term is not None
        return ProcDef(proc, tuple(formals), premises[0].term)

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        proc, formals = node.payload["proc"]
        formals = tuple(formals)
        premise = premises[0]
        n = len(formals)
        require(
            n <= len(premise.vars) and premise.vars[len(premise.vars) - n :] == formals,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"premise must end with the formals {_names(formals)}",
        )
        inputs = premise.vars[: len(premise.vars) - n]
        expected = inputs + (proc,)
        require(
            node.judgment.vars == expected,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"expected variables {_names(expected)}, found {_names(node.judgment.vars)}",
        )
        require(
            checker.equivalent(node.judgment.relation, ProcRelation(premise.relation, len(inputs))),
            DiagnosticCode.RELATION_MISMATCH,
            f"conclusion relation must be (proc_relation {premise.relation} {len(inputs)})",
        )
        _no_preconditions(term, node.judgment.vars)
        checker.obligation(node, f"every input admits {proc.name}", lambda: checker.holds(node.judgment, term))


class Application1Rule(InferenceRule):
    rule = Rule.APPLICATION1
    min_premises = max_premises = 1

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        body = premises[0].term
        require(
            isinstance(body, Seq) and isinstance(body.second, ProcCall) and body.second.prefix is None,
            DiagnosticCode.TERM_MISMATCH,
            "premise must be a program followed by a call",
        )
        assert isinstance(body, Seq) and isinstance(body.second, ProcCall)
        return ProcCall(body.second.proc, body.second.actuals, body.first)

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        require(premises[0].vars == node.judgment.vars, DiagnosticCode.VAR_LIST_MISMATCH, "variable list changed")
        require(
            checker.equivalent(node.judgment.relation, premises[0].relation),
            DiagnosticCode.RELATION_MISMATCH,
            "application keeps the relation",
        )
        _no_preconditions(term, node.judgment.vars)


class Application2Rule(InferenceRule):
    rule = Rule.APPLICATION2
    needs_term = True

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        require(
            isinstance(term, ProcCall) and term.prefix is None,
            DiagnosticCode.TERM_MISMATCH,
            "the conclusion must be a bare procedure call",
        )
        assert isinstance(term, ProcCall)
        expected = tuple(v for v in term.actuals if not v.is_psi) + (term.proc,)
        expected += tuple(v for v in term.actuals if v.is_psi)
        require(
            node.judgment.vars == expected,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"expected variables {_names(expected)}, found {_names(node.judgment.vars)}",
        )
        checker.obligation(
            node, f"calls of {term.proc.name} satisfy the relation", lambda: checker.holds(node.judgment, term)
        )


class LeastFixpointRule(InferenceRule):
    rule = Rule.LEAST_FIXPOINT
    min_premises = max_premises = 1
    required = ("fix",)

    def derive(self, node: ProofTree, premises: Sequence[Judgment]) -> Optional[Term]:
        used, defined = node.payload["fix"]
        assert premises[0].term is not None
        return Fix(used, defined, premises[0].term)

    def check(self, node: ProofTree, term: Term, premises: Sequence[Judgment], checker: "Checker") -> None:
        used, defined = node.payload["fix"]
        premise = premises[0]
        assert premise.term is not None
        sets = var_sets(premise.term)
        require(used.kind == defined.kind, DiagnosticCode.FIX_VAR_KIND, f"{used.name} and {defined.name} differ in kind")
        require(used in sets.inputs, DiagnosticCode.VAR_LIST_MISMATCH, f"{used.name} is not an input of the body")
        require(defined in sets.outputs, DiagnosticCode.VAR_LIST_MISMATCH, f"{defined.name} is not an output of the body")
        require(
            used in premise.vars and defined in premise.vars,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"premise must list {used.name} and {defined.name}",
        )
        inputs = [v for v in premise.vars if v in sets.inputs or v.is_psi]
        outputs = [v for v in premise.vars if v in sets.outputs]
        require(
            len(inputs) + len(outputs) == len(premise.vars),
            DiagnosticCode.VAR_LIST_MISMATCH,
            "every listed variable must be an input or an output of the body",
        )
        expected = tuple(v for v in premise.vars if v != used)
        require(
            node.judgment.vars == expected,
            DiagnosticCode.VAR_LIST_MISMATCH,
            f"expected variables {_names(expected)}, found {_names(node.judgment.vars)}",
        )
        _no_preconditions(term, node.judgment.vars)
        checker.obligation(
            node,
            f"{premise.relation} is exclusive and the fixpoint satisfies {node.judgment.relation}",
            lambda: checker.fixpoint(premise, inputs, outputs, node.judgment, term),
        )


RULES: Mapping[Rule, InferenceRule] = {
    r.rule: r
    for r in (
        AxiomRule(),
        UnderlyingLogicRule(),
        UniversalQuantificationRule(),
        VariableRenamingRule(),
        Permutation1Rule(),
        Permutation2Rule(),
        EqualityRule(),
        SubstitutionRule(),
        CorrespondenceRule(),
        DefinitionalIndependenceRule(),
        NewVariableRule(),
        CompositionRule(),
        ConditionalRule(),
        OutputDeletionRule(),
        ProcedureRule(),
        Application1Rule(),
        Application2Rule(),
        LeastFixpointRule(),
    )
}


def exclusive(relation: RelExpr, premise: Judgment, inputs: Sequence[VarId], outputs: Sequence[VarId], checker: "Checker") -> Verdict:
    """At most one output tuple satisfies the relation per input tuple; ⊥ runs make this Unknown."""
    assert premise.term is not None
    seen: Dict[Tuple, set] = defaultdict(set)
    checked = 0
    for input_env, outcome in checker.outcomes(premise.term, premise.vars):
        if isinstance(outcome, Bottom):
            return Unknown(outcome.reason or "a body run has no result", checked)
        try:
            sems = select(outcome, premise.vars)
            if not relation.evaluate(sems, checker.ctx):
                continue
        except Inconclusive as e:
            return Unknown(str(e), checked)
        checked += 1
        key = tuple(_initial(s) for s in select(outcome, inputs))
        seen[key].add(tuple(select(outcome, outputs)))
        if len(seen[key]) > 1:
            return CounterExample(outcome, input_env, checked)
    return Valid(checked)


def _initial(sem: Any) -> Any:
    return sem.init if isinstance(sem, DataSem) else sem

