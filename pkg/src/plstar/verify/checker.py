"""
Proof checking.

Checking runs in two passes. The first walks the tree bottom-up, derives
every conclusion term from its premises and checks each rule's syntactic
side conditions exactly; semantic side conditions are collected as
obligations. The second pass hands the obligations to the oracle: the
brute-force oracle decides them on a finite domain, the assumed oracle
records its label instead.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Literal, Mapping, Optional, Sequence, Tuple

from loguru import logger

from ..analysis.diagnostics import Diagnostic, DiagnosticCode
from ..errors import PlstarError
from ..interp.builtins import BUILTINS, BuiltinRegistry
from ..interp.enumeration import Models, input_space
from ..interp.evaluator import eval, compose_phi
from ..interp.semantics import Bottom, DataSem, Domain, Env, Fuel
from ..ir.substitution import free_vars
from ..ir.terms import Seq, Term, VarId, fragment_names
from .holds import CounterExample, Outcomes, Unknown, Valid, Verdict, check_outcomes, judgment_term, outcomes, select
from .library import load_libraries
from .proofs import Judgment, ProofTree
from .relations import Inconclusive, Library, RelContext, RelExpr, Select, normalize
from .rules import RULES, RuleViolation, exclusive, require, same_term


@dataclass(frozen=True)
class Oracle:
    """How semantic side conditions are discharged."""

    mode: Literal["brute-force", "assumed"] = "brute-force"
    label: str = ""
    domain: Domain = Domain()
    fuel: Fuel = Fuel()

    @classmethod
    def brute_force(cls, domain: Domain = Domain(), fuel: Fuel = Fuel()) -> "Oracle":
        return cls("brute-force", "", domain, fuel)

    @classmethod
    def assumed(cls, label: str) -> "Oracle":
        return cls("assumed", label)


@dataclass(frozen=True)
class NodeVerdict:
    node: str
    rule: str
    outcome: Literal["syntactic", "checked", "assumed", "unknown"]
    detail: str = ""
    bindings: Tuple[Tuple[str, int], ...] = ()


@dataclass(frozen=True)
class CheckReport:
    status: Literal["Accepted", "Rejected", "Unknown"]
    verdicts: Tuple[NodeVerdict, ...]
    assumed: Tuple[str, ...]
    domain: str
    rejected: Optional[str] = None
    diagnostic: Optional[Diagnostic] = None
    conclusion: Optional[Judgment] = None

    @property
    def accepted(self) -> bool:
        return self.status == "Accepted"

    def lines(self) -> List[str]:
        """Line-oriented summary for the command line."""
        out = [self.status]
        if self.rejected is not None and self.diagnostic is not None:
            out.append(f"rejected at {self.rejected}: {self.diagnostic.code.value} {self.diagnostic.message}")
        for label in self.assumed:
            out.append(f"assumed: {label}")
        for verdict in self.verdicts:
            if verdict.outcome == "unknown":
                out.append(f"unknown at {verdict.node}: {verdict.detail}")
        out.append(f"domain: {self.domain}")
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "assumed": list(self.assumed),
            "domain": self.domain,
            "rejected": self.rejected,
            "diagnostic": self.diagnostic.to_dict() if self.diagnostic else None,
            "nodes": [
                {"node": v.node, "rule": v.rule, "outcome": v.outcome, "detail": v.detail, "bindings": dict(v.bindings)}
                for v in self.verdicts
            ],
        }


@dataclass(frozen=True)
class _Implies(RelExpr):
    premise: RelExpr
    conclusion: RelExpr

    def arity(self, ctx: RelContext) -> int:
        return self.conclusion.arity(ctx)

    def evaluate(self, sems: Sequence[Any], ctx: RelContext) -> bool:
        return not self.premise.evaluate(sems, ctx) or self.conclusion.evaluate(sems, ctx)


@dataclass
class _Obligation:
    node: ProofTree
    description: str
    thunk: Callable[[], Verdict]
    ctx: RelContext
    bindings: Tuple[Tuple[str, int], ...]


class _Rejected(Exception):
    def __init__(self, node: ProofTree, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.node = node
        self.diagnostic = diagnostic


class Checker:
    """Checks one proof tree against one oracle; semantic results are cached per instance."""

    def __init__(
        self,
        oracle: Oracle,
        library: Optional[Library] = None,
        models: Optional[Models] = None,
        registry: Optional[BuiltinRegistry] = None,
    ):
        self.oracle = oracle
        self.models = models or {}
        self.registry = registry or BUILTINS
        self.base = RelContext(library or load_libraries(), oracle.domain, oracle.fuel, self.registry)
        self.ctx = self.base
        self.cache: Dict[Any, Any] = {}
        self.pending: List[_Obligation] = []
        self.verdicts: List[NodeVerdict] = []
        self.assumed: List[str] = []
        self._term: Optional[Term] = None
        self._bindings: Tuple[Tuple[str, int], ...] = ()

    # first pass

    def run(self, tree: ProofTree) -> CheckReport:
        domain = self.oracle.domain.describe()
        try:
            conclusion = self.walk(tree, {})
        except _Rejected as e:
            logger.info(f"Proof rejected at {e.node.name}: {e.diagnostic.message}")
            return self._report("Rejected", domain, e.node, e.diagnostic)
        unknown = False
        for obligation in self.pending:
            self.ctx = obligation.ctx
            verdict = self._discharge(obligation)
            if isinstance(verdict, CounterExample):
                diagnostic = Diagnostic(
                    DiagnosticCode.SIDE_CONDITION_FAILED,
                    f"{obligation.description} fails: {verdict.env!r} from input {verdict.input!r}",
                )
                logger.info(f"Proof rejected at {obligation.node.name}: {obligation.description}")
                return self._report("Rejected", domain, obligation.node, diagnostic)
            if isinstance(verdict, Unknown):
                unknown = True
                self._verdict(obligation.node, "unknown", f"{obligation.description}: {verdict.reason}", obligation.bindings)
            else:
                self._verdict(obligation.node, "checked", f"{obligation.description} ({verdict.checked} environments)", obligation.bindings)
        status: Literal["Accepted", "Unknown"] = "Unknown" if unknown else "Accepted"
        logger.info(f"Proof {status.lower()} on {domain}")
        return self._report(status, domain, conclusion=conclusion)

    def _report(
        self,
        status: Literal["Accepted", "Rejected", "Unknown"],
        domain: str,
        node: Optional[ProofTree] = None,
        diagnostic: Optional[Diagnostic] = None,
        conclusion: Optional[Judgment] = None,
    ) -> CheckReport:
        return CheckReport(
            status,
            tuple(self.verdicts),
            tuple(dict.fromkeys(self.assumed)),
            domain,
            node.name if node is not None else None,
            diagnostic,
            conclusion,
        )

    def walk(self, node: ProofTree, bindings: Mapping[str, int]) -> Judgment:
        rule = RULES[node.rule]
        ctx = replace(self.base, bindings=dict(bindings))
        self.ctx = ctx
        try:
            count = len(node.premises)
            require(
                rule.min_premises <= count <= rule.max_premises,
                DiagnosticCode.RULE_ARITY,
                f"{node.rule.value} takes {rule.min_premises}..{rule.max_premises} premises, got {count}",
            )
            missing = [key for key in rule.required if key not in node.payload]
            require(not missing, DiagnosticCode.MISSING_PAYLOAD, f"{node.rule.value} needs payload {', '.join(missing)}")
            inner = rule.bindings(node)
        except RuleViolation as e:
            raise _Rejected(node, Diagnostic(e.code, e.message)) from None

        premises: List[Judgment] = []
        for premise in node.premises:
            resolved = [self.walk(premise, {**bindings, **extra}) for extra in inner]
            premises.append(resolved[0])

        self.ctx = ctx
        self._bindings = tuple(sorted(bindings.items()))
        before = len(self.pending) + len(self.verdicts)
        try:
            derived = rule.derive(node, premises)
            term = node.judgment.term
            if term is None:
                require(derived is not None, DiagnosticCode.TERM_MISMATCH, f"{node.rule.value} needs an explicit term")
                term = derived
            elif derived is not None:
                require(same_term(term, derived), DiagnosticCode.TERM_MISMATCH, "conclusion term differs from the derived one")
            assert term is not None
            self._term = term
            self._bookkeeping(node.judgment, term)
            rule.check(node, term, premises, self)
        except RuleViolation as e:
            raise _Rejected(node, Diagnostic(e.code, e.message)) from None
        if len(self.pending) + len(self.verdicts) == before:
            self._verdict(node, "syntactic")
        return node.judgment.with_term(term)

    def _bookkeeping(self, judgment: Judgment, term: Term) -> None:
        unlisted = sorted(v.name for v in free_vars(term) if v.is_data and not v.is_psi and v not in judgment.vars)
        require(not unlisted, DiagnosticCode.VAR_LIST_MISMATCH, f"free data variables {', '.join(unlisted)} are not listed")
        try:
            arity = judgment.relation.arity(self.ctx)
        except PlstarError as e:
            raise RuleViolation(DiagnosticCode.RELATION_MISMATCH, e.message) from None
        require(
            arity == len(judgment.vars),
            DiagnosticCode.RELATION_MISMATCH,
            f"{judgment.relation} takes {arity} arguments, the list has {len(judgment.vars)}",
        )

    def _verdict(self, node: ProofTree, outcome: Any, detail: str = "", bindings: Optional[Tuple] = None) -> None:
        self.verdicts.append(NodeVerdict(node.name, node.rule.value, outcome, detail, bindings or self._bindings))

    # interface used by the rules

    def equivalent(self, left: RelExpr, right: RelExpr) -> bool:
        if left == right:
            return True
        try:
            return normalize(left, self.ctx) == normalize(right, self.ctx)
        except PlstarError:
            # parameters bound by an enclosing quantifier are not known here
            return False

    def obligation(self, node: ProofTree, description: str, thunk: Callable[[], Verdict]) -> None:
        label = node.assumed or (self.oracle.label if self.oracle.mode == "assumed" else None)
        if label:
            self.assumed.append(label)
            self._verdict(node, "assumed", f"{description} [{label}]")
            return
        if self._term is not None and fragment_names(self._term):
            raise RuleViolation(
                DiagnosticCode.ORACLE_REFUSED,
                f"{description}: the program has fragments, so this premise must be assumed",
            )
        self.pending.append(_Obligation(node, description, thunk, self.ctx, self._bindings))

    def _discharge(self, obligation: _Obligation) -> Verdict:
        try:
            return obligation.thunk()
        except Inconclusive as e:
            return Unknown(str(e), 0)
        except PlstarError as e:
            return Unknown(f"{e.code}: {e.message}", 0)

    def outcomes(self, term: Term, vars_: Sequence[VarId]) -> Outcomes:
        return outcomes(term, vars_, self.oracle.domain, self.oracle.fuel, self.models, self.registry, self.cache)

    def holds(self, judgment: Judgment, term: Term) -> Verdict:
        return check_outcomes(judgment.relation, judgment.vars, self.outcomes(term, judgment.vars), self.ctx)

    def implication(self, premise: RelExpr, conclusion: RelExpr, vars_: Sequence[VarId], term: Term) -> Verdict:
        return check_outcomes(_Implies(premise, conclusion), vars_, self.outcomes(term, vars_), self.ctx)

    def transfer(self, premise: Judgment, conclusion: Judgment, both: Sequence[VarId], term: Term) -> Verdict:
        """Every semantics over both lists that satisfies the premise on x satisfies the conclusion on y."""
        n = len(both)
        relation = _Implies(
            Select(premise.relation, tuple(both.index(v) + 1 for v in premise.vars), n),
            Select(conclusion.relation, tuple(both.index(v) + 1 for v in conclusion.vars), n),
        )
        return check_outcomes(relation, both, self.outcomes(term, both), self.ctx)

    def composition(self, first: Judgment, second: Judgment, conclusion: Judgment, term: Term) -> Verdict:
        """``∀fg (R1(f(y)) ∧ R2(g(z)) ⊃ R(φ(f, g)(y∘z)))`` over chained runs of the two parts."""
        assert isinstance(term, Seq)
        checked = 0
        unknown: Optional[str] = None
        for input_env, f, g, h in self._pairs(term, conclusion.vars):
            if h is None:
                bottom = g if isinstance(g, Bottom) else f
                if bottom.fuel_exhausted:
                    unknown = unknown or bottom.reason
                continue
            try:
                if not (
                    first.relation.evaluate(select(f, first.vars), self.ctx)
                    and second.relation.evaluate(select(g, second.vars), self.ctx)
                ):
                    continue
                checked += 1
                if not conclusion.relation.evaluate(select(h, conclusion.vars), self.ctx):
                    return CounterExample(h, input_env, checked)
            except Inconclusive as e:
                unknown = unknown or str(e)
        return Unknown(unknown, checked) if unknown else Valid(checked)

    def _pairs(self, term: Seq, vars_: Sequence[VarId]) -> List[Tuple[Env, Any, Any, Any]]:
        padded = judgment_term(term, vars_)
        key = ("pairs", padded)
        if key in self.cache:
            return self.cache[key]
        domain, fuel = self.oracle.domain, self.oracle.fuel
        pairs: List[Tuple[Env, Any, Any, Any]] = []
        for env in input_space(padded, domain, fuel, self.models, registry=self.registry):
            f = eval(term.first, env, fuel, self.registry, domain.int_range)
            if isinstance(f, Bottom):
                pairs.append((env, f, None, None))
                continue
            middle = Env({v: DataSem(s.fin) if isinstance(s, DataSem) else s for v, s in f.items()}, DataSem(f.psi.fin))
            g = eval(term.second, middle, fuel, self.registry, domain.int_range)
            if isinstance(g, Bottom):
                pairs.append((env, f, g, None))
                continue
            pairs.append((env, f, g, compose_phi(f, g, term.first, term.second)))
        self.cache[key] = pairs
        return pairs

    def conditional(
        self, then: Optional[Judgment], orelse: Optional[Judgment], conclusion: Judgment, term: Term
    ) -> Verdict:
        """``(x' ∧ R1(y')) ∨ (¬x' ∧ R2(z')) ⊃ R(x', y', z')``; an empty branch contributes ``true``."""
        x = conclusion.vars[0]
        checked = 0
        unknown: Optional[str] = None
        for input_env, outcome in self.outcomes(term, conclusion.vars):
            if isinstance(outcome, Bottom):
                if outcome.fuel_exhausted:
                    unknown = unknown or outcome.reason
                continue
            branch = then if outcome.data(x).init is True else orelse
            try:
                if branch is not None and not branch.relation.evaluate(select(outcome, branch.vars), self.ctx):
                    continue
                checked += 1
                if not conclusion.relation.evaluate(select(outcome, conclusion.vars), self.ctx):
                    return CounterExample(outcome, input_env, checked)
            except Inconclusive as e:
                unknown = unknown or str(e)
        return Unknown(unknown, checked) if unknown else Valid(checked)

    def fixpoint(
        self, premise: Judgment, inputs: Sequence[VarId], outputs: Sequence[VarId], conclusion: Judgment, term: Term
    ) -> Verdict:
        verdict = exclusive(premise.relation, premise, inputs, outputs, self)
        if not isinstance(verdict, Valid):
            return verdict
        return self.holds(conclusion, term)


def check_proof(
    tree: ProofTree,
    oracle: Optional[Oracle] = None,
    library: Optional[Library] = None,
    models: Optional[Models] = None,
    registry: Optional[BuiltinRegistry] = None,
) -> CheckReport:
    """Check every rule application of ``tree``.

    Args:
        tree: the proof
        oracle: brute force over a finite domain (default) or a blanket assumption
        library: relations the proof's named relations resolve against
        models: candidate semantics for free procedures, by variable or name
        registry: builtins

    Returns:
        A report: ``Accepted`` when every node passes, ``Rejected`` with the
        first failing node and its diagnostic, or ``Unknown`` when some
        semantic premise ran out of fuel.
    """
    return Checker(oracle or Oracle(), library, models, registry).run(tree)


def mutations(tree: ProofTree) -> List[Tuple[str, ProofTree]]:
    """Single-point corruptions of an accepted proof, each of which must be rejected.

    Assumption labels are left alone: dropping one hands its premise to the
    brute-force oracle, which may well accept it.
    """
    found: List[Tuple[str, ProofTree]] = []
    for node in tree.nodes():
        rule = RULES[node.rule]
        for key in rule.required:
            if key in node.payload:
                payload = {k: v for k, v in node.payload.items() if k != key}
                found.append((f"drop {key} at {node.name}", tree.replaced(node, replace(node, payload=payload))))
        if len(node.premises) >= 2:
            swapped = tuple(reversed(node.premises))
            found.append((f"swap premises at {node.name}", tree.replaced(node, replace(node, premises=swapped))))
        if node.premises:
            fewer = node.premises[:-1]
            found.append((f"drop premise at {node.name}", tree.replaced(node, replace(node, premises=fewer))))
        if node.judgment.vars:
            judgment = replace(node.judgment, vars=node.judgment.vars[:-1])
            found.append((f"drop variable at {node.name}", tree.replaced(node, replace(node, judgment=judgment))))
        if "sigma" in node.payload and node.premises:
            illegal = _identifying_sigma(node.premises[0].judgment.vars)
            if illegal is not None and illegal != node.payload["sigma"]:
                payload = {**node.payload, "sigma": illegal}
                found.append((f"illegal sigma at {node.name}", tree.replaced(node, replace(node, payload=payload))))
    return found


def _identifying_sigma(vars_: Sequence[VarId]) -> Optional[Tuple[int, ...]]:
    data = [i for i, v in enumerate(vars_) if v.is_data and not v.is_psi]
    for a in data:
        for b in data:
            if a < b and vars_[a] != vars_[b]:
                sigma = list(range(1, len(vars_) + 1))
                sigma[b] = a + 1
                return tuple(sigma)
    return None
