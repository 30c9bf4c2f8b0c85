"""
Tests for variable sets, argument types, preconditions and substitution legality.
"""

import pytest
from hypothesis import given

from plstar.analysis import (
    DiagnosticCode,
    check_correspondence,
    check_preconditions,
    check_subst,
    pad_variables,
    type_of,
    var_sets,
)
from plstar.errors import UnknownVariable, VarAlreadyPresent
from plstar.interp import Domain
from plstar.ir import PSI, Cond, Local, Pad, Seq, Substitution
from plstar.parser import SigEnv, parse

from .common import SCALARS, scalar_signatures
from .strategies import programs


def codes(diagnostics):
    return {d.code for d in diagnostics}


class TestVarSets:
    """Inputs, outputs, updates and data of each term form."""

    def test_call(self, scalars):
        """Arguments split by direction; the procedure itself is an input."""
        sets = var_sets(parse("call inc(a, b)", scalars))
        assert {v.name for v in sets.inputs} == {"a", "inc"}
        assert {v.name for v in sets.outputs} == {"b"}
        assert not sets.updates

    def test_inout_leaf_is_an_update(self, scalars):
        """An inout argument is both written and observed; psi is never listed."""
        sets = var_sets(parse("call bump(a)", scalars))
        assert {v.name for v in sets.outputs} == {"a"}
        assert {v.name for v in sets.updates} == {"a"}
        assert PSI not in sets.free

    def test_sequence(self, scalars):
        """Values passed along a sequence are not inputs of the whole."""
        sets = var_sets(parse("call inc(a, b); call id(b, c)", scalars))
        assert {v.name for v in sets.inputs} == {"a", "inc", "id"}
        assert {v.name for v in sets.outputs} == {"b", "c"}

    def test_one_sided_branch_updates(self, scalars):
        """A variable written in one branch only keeps its initial value otherwise."""
        sets = var_sets(parse("if w then call inc(a, b) fi", scalars))
        assert {v.name for v in sets.updates} == {"b"}
        assert "w" in {v.name for v in sets.inputs}

    def test_binders(self, scalars):
        """Locals and formals leave the sets; a definition outputs its procedure."""
        local = var_sets(parse("var b; call inc(a, b)", scalars))
        assert {v.name for v in local.free} == {"a", "inc"}
        definition = var_sets(parse("proc p(x, y); call inc(x, y) end p", scalars))
        assert {v.name for v in definition.outputs} == {"p"}
        assert {v.name for v in definition.inputs} == {"inc"}

    def test_pad_adds_data(self, scalars):
        """Padded variables count as data without being free."""
        sets = var_sets(parse("pad z in call inc(a, b) end", scalars))
        assert "z" in {v.name for v in sets.data}
        assert "z" not in {v.name for v in sets.free}

    @given(programs(), programs())
    def test_sequence_composes(self, first, second):
        """Outputs of P; Q are the union; inputs are what neither part produces."""
        scalars = scalar_signatures()
        p, q = parse(first, scalars), parse(second, scalars)
        left, right, sets = var_sets(p), var_sets(q), var_sets(Seq(p, q))
        assert sets.outputs == left.outputs | right.outputs
        assert sets.inputs == (left.inputs | right.inputs) - sets.outputs
        assert sets.padded == left.padded | right.padded

    @given(programs(), programs())
    def test_branches_and_binders(self, first, second):
        """A branch joins both sides and keeps one-sided outputs; a binder only removes its variable."""
        scalars = scalar_signatures()
        p, q = parse(first, scalars), parse(second, scalars)
        w, c = scalars.get("w").var(), scalars.get("c").var()
        left, right, sets = var_sets(p), var_sets(q), var_sets(Cond(w, p, q))
        assert sets.outputs == left.outputs | right.outputs
        assert sets.inputs == ({w} | left.inputs | right.inputs) - sets.outputs
        assert {v for v in left.outputs ^ right.outputs if v.is_data} <= sets.updates
        assert var_sets(Local(c, p)) == left.without([c])


class TestTypeOf:
    """The (in, out, data, proc) query."""

    def test_factorial_parameters(self, factorial):
        """n is read and v is written by the body of f."""
        assert type_of("f", factorial, [1]) == (True, False, True, False)
        assert type_of("f", factorial, [2]) == (False, True, True, False)

    def test_variable_itself(self, scalars):
        """Without an index the flags describe the variable in the term."""
        term = parse("call inc(a, b)", scalars)
        assert type_of("a", term) == (True, False, True, False)
        assert type_of("b", term) == (False, True, True, False)
        assert type_of("inc", term) == (True, False, False, True)

    def test_signature_fallback(self, scalars):
        """Procedures not defined in the term answer from their signature."""
        term = parse("call inc(a, b)", scalars)
        assert type_of("inc", term, [2]) == (False, True, True, False)

    def test_unknown(self, scalars):
        """Names that do not occur are rejected."""
        with pytest.raises(UnknownVariable):
            type_of("nope", parse("call inc(a, b)", scalars))
        with pytest.raises(UnknownVariable):
            type_of("a", parse("call inc(a, b)", scalars), [1])


class TestPreconditions:
    """One diagnostic code per violated operator precondition."""

    @pytest.mark.parametrize("name", ["factorial", "quicksort", "update"])
    def test_sample_programs_are_clean(self, request, name):
        """The shipped programs satisfy every precondition."""
        assert check_preconditions(request.getfixturevalue(name)) == []

    @pytest.mark.parametrize(
        "text, code",
        [
            (
                "proc p(x, y); call inc(x, y) end p; proc p(x, y); call id(x, y) end p",
                DiagnosticCode.SHARED_PROC_OUTPUT,
            ),
            (
                "proc p(x, y); call inc(x, y) end p; proc p(x, y); call id(x, y) end p",
                DiagnosticCode.PROC_REDEFINED,
            ),
            ("call inc(a, a)", DiagnosticCode.ALIASED_OUTPUTS),
            ("var c; call inc(c, a)", DiagnosticCode.DATA_USE_BEFORE_DEF),
            ("fix u as p in call inc(a, b) end", DiagnosticCode.FIX_VAR_KIND),
            ("proc p(x, y); call inc(y, x) end p", DiagnosticCode.SIG_MISMATCH),
            ("proc p(x, y); call inc(x, b) end p", DiagnosticCode.FORMAL_IS_OUTER_OUTPUT),
            ("proc p(x, y); call inc(a, y); call bump(x) end p", DiagnosticCode.SIDE_EFFECT_ON_CAPTURED_VAR),
        ],
    )
    def test_violation(self, scalars, text, code):
        """Each malformed term reports its code."""
        assert code in codes(check_preconditions(parse(text, scalars)))

    def test_well_formed_definition(self, scalars):
        """A definition that matches its signature is clean."""
        a, b = scalars.get("a").var(), scalars.get("b").var()
        term = parse("proc p(x, y); call inc(x, y) end p; call p(a, b)", scalars)
        assert check_preconditions(term, listed=[a, b]) == []

    def test_data_set_mismatch_by_default(self, scalars):
        """Differing data sets across ';' are reported unless the variables are in scope."""
        diagnostics = check_preconditions(parse("call inc(a, b); call inc(c, z)", scalars))
        assert codes(diagnostics) == {DiagnosticCode.DATA_SET_MISMATCH}
        [mismatch] = check_preconditions(parse("call inc(a, b); call id(b, c)", scalars))
        assert mismatch.related == ("a", "c")

    def test_implicit_padding(self, scalars):
        """The lenient mode treats every mismatch as padded."""
        term = parse("call inc(a, b); call inc(c, z)", scalars)
        assert check_preconditions(term, implicit_padding=True) == []

    @pytest.mark.parametrize(
        "text",
        [
            "pad c in call inc(a, b) end; pad a in call id(b, c) end",
            "proc q(a, c); var b; call inc(a, b); call id(b, c) end q",
        ],
    )
    def test_mismatch_in_scope(self, scalars, text):
        """Explicit padding, formals and locals account for the differing variables."""
        assert check_preconditions(parse(text, scalars)) == []

    def test_listed_variables(self, scalars):
        """Variables listed for the whole term are in scope."""
        a, c = scalars.get("a").var(), scalars.get("c").var()
        term = parse("call inc(a, b); call id(b, c)", scalars)
        assert check_preconditions(term, listed=[a, c]) == []

    def test_side_effect_through_called_procedure(self):
        """ψ effects are found through calls to other defined procedures."""
        env = SigEnv.from_mapping({**SCALARS, "r": "proc(inout int)"})
        term = parse("proc r(x); call bump(x) end r; proc p(x, y); call inc(a, y); call r(x) end p", env)
        assert DiagnosticCode.SIDE_EFFECT_ON_CAPTURED_VAR in codes(check_preconditions(term))

    def test_diagnostics_are_positioned_and_sorted(self, scalars):
        """Diagnostics carry the source position of the offending node, in order."""
        a, b = scalars.get("a").var(), scalars.get("b").var()
        term = parse("call inc(a, b);\nvar c;\ncall inc(c, a);\ncall inc(b, b)", scalars)
        diagnostics = check_preconditions(term, listed=[a, b])
        assert [d.code for d in diagnostics] == [DiagnosticCode.DATA_USE_BEFORE_DEF, DiagnosticCode.ALIASED_OUTPUTS]
        assert [d.position for d in diagnostics] == [(3, 1), (4, 1)]

    def test_format(self, scalars):
        """The text form is 'Code path:line:col message'."""
        [diagnostic] = check_preconditions(parse("call inc(a, a)", scalars))
        assert diagnostic.format("prog.pl") == "AliasedOutputs prog.pl:1:1 a is passed twice to inc and written"
        assert diagnostic.to_dict("prog.pl")["code"] == "AliasedOutputs"


class TestPadVariables:
    """Listing unused data variables."""

    def test_pad(self, scalars):
        """Extra variables are listed on a Pad node; padding a Pad extends it."""
        term = parse("call inc(a, b)", scalars)
        z, w = scalars.get("z").var(), scalars.get("w").var()
        padded = pad_variables(term, [z])
        assert isinstance(padded, Pad) and padded.extra == (z,)
        again = pad_variables(padded, [w])
        assert [v.name for v in again.extra] == ["z", "w"]
        assert pad_variables(term, []) is term

    def test_already_present(self, scalars):
        """Variables of the term and procedure variables cannot be padded."""
        term = parse("call inc(a, b)", scalars)
        with pytest.raises(VarAlreadyPresent):
            pad_variables(term, [scalars.get("a").var()])
        with pytest.raises(VarAlreadyPresent):
            pad_variables(term, [scalars.get("id").var()])


class TestCheckSubst:
    """Legality of substitutions on a term."""

    def test_renaming_is_legal(self, scalars):
        """A renaming to a fresh variable produces no diagnostics."""
        term = parse("call inc(a, b); call id(b, c)", scalars)
        assert check_subst(term, Substitution({scalars.get("a").var(): scalars.get("z").var()})) == []

    def test_merged_outputs(self, scalars):
        """Mapping two outputs together is neither output-injective nor data-preserving."""
        term = parse("call inc(a, b); call id(b, c)", scalars)
        theta = Substitution({scalars.get("b").var(): scalars.get("c").var()})
        assert codes(check_subst(term, theta)) == {
            DiagnosticCode.NOT_OUTPUT_INJECTIVE,
            DiagnosticCode.DATA_IDENTIFIED,
        }

    def test_kind_and_psi(self, scalars):
        """Kinds must agree and psi stays fixed."""
        term = parse("call inc(a, b)", scalars)
        a, w = scalars.get("a").var(), scalars.get("w").var()
        assert DiagnosticCode.KIND_MISMATCH in codes(check_subst(term, Substitution({a: w})))
        assert DiagnosticCode.PSI_VIOLATION in codes(check_subst(term, Substitution({PSI: a})))


class TestCorrespondence:
    """Comparing a term listed over two variable lists."""

    def test_same_lists(self, scalars):
        """Identical lists agree under both forms."""
        term = parse("call inc(a, b)", scalars)
        xs = [scalars.get(n).var() for n in ("a", "b", "inc")]
        report = check_correspondence(term, xs, xs, Domain(int_range=(0, 3)))
        assert report.form_a is True and report.form_b is True
        assert report.agree

    def test_padded_list(self, scalars):
        """An extra data variable disables the first form; the second compares the shared part."""
        term = parse("call inc(a, b)", scalars)
        xs = [scalars.get(n).var() for n in ("a", "b", "inc")]
        ys = xs + [scalars.get("z").var()]
        report = check_correspondence(term, xs, ys, Domain(int_range=(0, 3)))
        assert report.form_a is None
        assert report.form_b is True
        assert report.compared == ("a", "b", "inc")

    def test_list_must_cover_free_variables(self, scalars):
        """A list that omits a free variable is rejected."""
        term = parse("call inc(a, b)", scalars)
        with pytest.raises(UnknownVariable):
            check_correspondence(term, [scalars.get("a").var()], [scalars.get("a").var()])
