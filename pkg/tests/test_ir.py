"""
Tests for terms, signatures, substitutions and the s-expression form.
"""

import pytest
from hypothesis import given

from plstar.errors import IRError, KindMismatch, PsiViolation, UnboundFragment, UnknownVariable, VarArityMismatch
from plstar.ir import (
    PSI,
    IO,
    Cond,
    DataKind,
    Fix,
    Fragment,
    FragmentBinding,
    Local,
    Prim,
    ProcCall,
    ProcDef,
    Seq,
    Sort,
    Substitution,
    VarId,
    alpha_equal,
    apply_subst,
    bound_vars,
    canonical,
    data,
    fragment_names,
    free_vars,
    fresh_var,
    instantiate,
    occurring_vars,
    parse_kind,
    parse_typesig,
    read_sexpr,
    read_sexprs,
    seq,
    subterms,
    to_sexpr,
)
from plstar.ir.sexpr import Quoted
from plstar.parser import parse

from .common import scalar_signatures, substitution
from .strategies import programs, substitutions

INT = DataKind(Sort.INT)
a = VarId("a", INT)
b = VarId("b", INT)
c = VarId("c", INT)
inc = VarId("inc", parse_kind("proc(in int, out int)"))


def call(x, y):
    return ProcCall(inc, (x, y))


def var_list(term):
    if isinstance(term, (Prim, Fragment)):
        return list(term.vars)
    if isinstance(term, ProcCall):
        return list(term.actuals)
    return []


class TestTypeSig:
    """Signature text and index queries."""

    def test_parse_nested_signature(self):
        """Procedure arguments nest their own signatures."""
        sig = parse_typesig("(inout int-array, in int, in proc(in int, out bool))")
        assert sig.arity == 3
        assert sig.at([1]).io == IO.INOUT
        assert sig.at([3, 2]).kind == data("bool")

    def test_flags(self):
        """flags answers (in, out, data, proc) for an index path."""
        sig = parse_typesig("(in int, out int, in proc(in int, out int))")
        assert sig.flags([1]) == (True, False, True, False)
        assert sig.flags([2]) == (False, True, True, False)
        assert sig.flags([3]) == (True, False, False, True)
        assert sig.flags([3, 2]) == (False, True, True, False)

    def test_out_of_range_index(self):
        """Indices outside the signature are rejected."""
        sig = parse_typesig("(in int)")
        with pytest.raises(IRError):
            sig.at([2])
        with pytest.raises(IRError):
            sig.at([1, 1])

    def test_round_trips_through_text(self):
        """str of a parsed signature parses back to the same signature."""
        kind = parse_kind("proc(inout int-array, in int, out bool)")
        assert parse_kind(str(kind)) == kind

    @pytest.mark.parametrize("text", ["proc(in float)", "proc(sideways int)", "proc(in int", "int int"])
    def test_bad_text(self, text):
        """Malformed signature text raises IRError."""
        with pytest.raises(IRError):
            parse_kind(text)


class TestTerms:
    """Construction checks and traversals."""

    def test_cond_needs_a_branch(self):
        """A conditional with two empty branches cannot be built."""
        w = VarId("w", data("bool"))
        with pytest.raises(IRError):
            Cond(w, None, None)

    def test_psi_must_be_last(self):
        """psi may only close a variable list."""
        with pytest.raises(PsiViolation):
            Fragment("X", (PSI, a))
        assert Fragment("X", (a, PSI)).vars[-1] is PSI

    def test_fix_needs_procedures(self):
        """Both fix variables are procedure variables."""
        with pytest.raises(IRError):
            Fix(a, inc, call(a, b))

    def test_seq_is_right_nested(self):
        """seq skips empty parts and nests to the right."""
        first, second, third = call(a, b), call(b, c), call(c, a)
        assert seq(first, None, second, third) == Seq(first, Seq(second, third))
        assert seq(None) is None

    def test_subterms_preorder(self):
        """Traversal visits a node before its children, left to right."""
        first, second = call(a, b), call(b, c)
        term = Local(b, Seq(first, second))
        assert list(subterms(term)) == [term, term.body, first, second]

    def test_bound_and_occurring(self):
        """Binders are collected separately from every occurrence."""
        term = Local(b, Seq(call(a, b), call(b, c)))
        assert bound_vars(term) == {b}
        assert occurring_vars(term) == {a, b, c, inc}
        assert free_vars(term) == {a, c, inc}

    def test_spans_do_not_affect_equality(self, scalars):
        """Terms parsed from differently laid out text compare equal."""
        left = parse("call inc(a, b); call id(b, c)", scalars)
        right = parse("call inc(a, b);\n\n    call id(b, c)", scalars)
        assert left == right
        assert hash(left) == hash(right)


class TestSubstitution:
    """Variable maps and their application."""

    def test_identity_off_domain(self):
        """A substitution leaves variables outside its domain alone."""
        theta = Substitution({a: b})
        assert theta(a) == b
        assert theta(c) == c
        assert theta.domain == {a}

    def test_composition(self):
        """then applies the left substitution first."""
        first = Substitution({a: b})
        second = Substitution({b: c})
        composed = first.then(second)
        assert composed(a) == c
        assert composed(b) == c

    def test_renaming(self):
        """A swap is a renaming; a merge is not."""
        assert Substitution({a: b, b: a}).is_renaming()
        assert not Substitution({a: b}).is_renaming()
        assert not Substitution({a: c, b: c}).is_injective_on([a, b])

    def test_from_names(self):
        """Names resolve against the universe; unknown targets are fresh variables of the same kind."""
        theta = Substitution.from_names({"a": "b", "c": "d"}, [a, b, c])
        assert theta(a) == b
        assert theta(c) == VarId("d", INT)
        with pytest.raises(UnknownVariable):
            Substitution.from_names({"z": "a"}, [a, b])

    def test_validate(self):
        """Substitutions keep kinds and never move psi."""
        with pytest.raises(KindMismatch):
            Substitution({a: inc}).validate()
        with pytest.raises(PsiViolation):
            Substitution({PSI: a}).validate()

    def test_fresh_var(self):
        """fresh_var adds the smallest free numeric suffix."""
        assert fresh_var(a, ["b"]) == a
        assert fresh_var(a, ["a", "a1"]).name == "a2"

    def test_apply_renames_capturing_binder(self):
        """Substituting b for a under a binder of b renames the binder."""
        term = Local(b, Seq(call(a, b), call(b, c)))
        result = apply_subst(term, Substitution({a: b}))
        assert isinstance(result, Local)
        assert result.var.name == "b1"
        assert free_vars(result) == {b, c, inc}

    def test_bound_occurrences_untouched(self):
        """Bound variables are not replaced."""
        term = Local(b, call(a, b))
        assert apply_subst(term, Substitution({b: c})) == term

    def test_alpha_equal(self):
        """Terms differing only in bound names are alpha-equal."""
        left = Local(b, Seq(call(a, b), call(b, c)))
        right = Local(VarId("t", INT), Seq(call(a, VarId("t", INT)), call(VarId("t", INT), c)))
        assert alpha_equal(left, right)
        assert not alpha_equal(left, Local(b, Seq(call(a, b), call(b, a))))

    def test_canonical_expands_prefixed_calls(self):
        """A call with a prefix has the same canonical form as prefix; call."""
        prefixed = ProcCall(inc, (b, c), call(a, b))
        assert canonical(prefixed) == canonical(Seq(call(a, b), ProcCall(inc, (b, c))))

    @given(programs())
    def test_identity_substitution_is_neutral(self, text):
        """Applying the empty substitution returns an equal term."""
        term = parse(text, scalar_signatures())
        assert apply_subst(term, Substitution.identity()) == term
        assert alpha_equal(term, canonical(term))
        assert free_vars(term) <= occurring_vars(term)

    @given(programs(), substitutions("abcxyz", "abcxyz"), substitutions("abcxyz", "abcxyz"))
    def test_substitutions_compose(self, text, first, second):
        """Applying two substitutions in turn equals applying their composition."""
        term = parse(text, scalar_signatures())
        theta, sigma = substitution(first), substitution(second)
        stepwise = apply_subst(apply_subst(term, theta), sigma)
        assert alpha_equal(stepwise, apply_subst(term, theta.then(sigma)))

    @given(programs(), substitutions("abcxyz", "abcxyz"))
    def test_psi_stays_last(self, text, pairs):
        """Every variable list keeps psi, once and in last position."""
        term = parse(text, scalar_signatures())
        result = apply_subst(term, substitution(pairs))
        for before, after in zip(subterms(term), subterms(result)):
            listed = var_list(after)
            assert (PSI in var_list(before)) == (PSI in listed)
            if PSI in listed:
                assert listed.count(PSI) == 1 and listed[-1] == PSI


class TestInstantiate:
    """Binding fragment variables."""

    X = VarId("x", INT)
    Y = VarId("y", INT)

    def binding(self, body):
        # the called procedure is a parameter too
        return FragmentBinding((self.X, self.Y, inc), body)

    def test_positional_renaming(self):
        """Parameters are renamed to the fragment's actual variables."""
        term = Seq(Fragment("X", (a, b, inc)), call(b, c))
        result = instantiate(term, {"X": self.binding(call(self.X, self.Y))})
        assert result == Seq(call(a, b), call(b, c))
        assert fragment_names(result) == frozenset()

    def test_unbound_fragment(self):
        """Every fragment must have a binding."""
        with pytest.raises(UnboundFragment):
            instantiate(Fragment("X", (a, b)), {})

    def test_arity(self):
        """Binding parameters must match the fragment's variables."""
        with pytest.raises(VarArityMismatch):
            instantiate(Fragment("X", (a, b)), {"X": FragmentBinding((self.X,), call(self.X, self.X))})

    def test_stray_free_variable(self):
        """A binding body may only use its parameters."""
        with pytest.raises(VarArityMismatch):
            instantiate(Fragment("X", (a, b, inc)), {"X": self.binding(call(self.X, c))})

    def test_kinds(self):
        """A parameter and its actual variable share a kind."""
        flag = VarId("f", data("bool"))
        with pytest.raises(KindMismatch):
            instantiate(Fragment("X", (a, flag, inc)), {"X": self.binding(call(self.X, self.Y))})

    def test_binding_binders_avoid_capture(self):
        """Locals of the binding are renamed away from the actual variables."""
        t = VarId("t", INT)
        body = Local(t, Seq(call(self.X, t), call(t, self.Y)))
        result = instantiate(Fragment("X", (t, b, inc)), {"X": self.binding(body)})
        assert isinstance(result, Local)
        assert result.var.name != "t"
        assert free_vars(result) == {t, b, inc}


class TestSexpr:
    """Canonical s-expression writer and the generic reader."""

    def test_writer_forms(self):
        """Each term form has its own head symbol; empty parts are ()."""
        w = VarId("w", data("bool"))
        term = Local(b, Seq(call(a, b), Cond(w, None, call(b, c))))
        assert to_sexpr(term) == "(local b (seq (call inc (a b)) (cond w () (call inc (b c)))))"

    def test_procdef(self):
        """Definitions list their formals."""
        p = VarId("p", parse_kind("proc(in int, out int)"))
        assert to_sexpr(ProcDef(p, (a, b), call(a, b))) == "(procdef p (a b) (call inc (a b)))"

    def test_reader(self):
        """Nested lists, atoms, quoted strings and comments."""
        items = read_sexprs('; header\n(a (b "c d") e) (f)')
        assert items == [["a", ["b", "c d"], "e"], ["f"]]
        assert isinstance(items[0][1][1], Quoted)
        assert read_sexpr("(x)") == ["x"]

