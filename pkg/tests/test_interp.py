"""
Tests for the reference interpreter: values, builtins, evaluation and enumeration.
"""

from collections import Counter

import pytest
from hypothesis import assume, given, settings

from plstar.analysis import check_subst, var_sets
from plstar.errors import (
    ConfigError,
    DomainTooLarge,
    DuplicateBuiltin,
    KindError,
    MissingInput,
    PhiPrecondViolated,
    UnboundFragment,
    UnboundPrimitive,
)
from plstar.interp import (
    BUILTINS,
    UNDEFINED,
    Bottom,
    BuiltinRegistry,
    DataSem,
    Domain,
    Env,
    Fuel,
    compose_phi,
    data_pairs,
    default_registry,
    defined_leq,
    eval,
    eval_call,
    format_value,
    hoare_partition,
    input_space,
    kleene_chain,
    parse_value,
    project,
    register_builtin,
    semantics_set,
    values_of_sort,
)
from plstar.ir import Sort, apply_subst
from plstar.ir.terms import EffectSummary
from plstar.parser import SigEnv, parse

from .common import scalar_signatures, substitution
from .strategies import fragment_free_programs, renamings, substitutions

SMALL = Domain(int_range=(0, 1))


def scalar_world():
    """Registry and models for every procedure the generated programs call."""
    registry = default_registry().copy()
    registry.register("bump", "(inout int)", lambda a: (a[0] + 1,))
    return registry, {"p": [registry.lookup("inc").intrinsic()]}


class TestValues:
    """Command-line values and their display."""

    @pytest.mark.parametrize(
        "text, sort, expected",
        [
            ("true", Sort.BOOL, True),
            ("false", Sort.BOOL, False),
            ("-3", Sort.INT, -3),
            ("[1, 2, 3]", Sort.INT_ARRAY, (1, 2, 3)),
            ("[]", Sort.INT_ARRAY, ()),
        ],
    )
    def test_parse(self, text, sort, expected):
        """Each sort reads its own literal form."""
        assert parse_value(text, sort) == expected

    def test_undefined(self):
        """'undefined' is accepted for every sort."""
        assert parse_value("undefined", Sort.INT) is UNDEFINED

    @pytest.mark.parametrize(
        "text, sort", [("yes", Sort.BOOL), ("1.5", Sort.INT), ("[true]", Sort.INT_ARRAY), ("{}", Sort.INT_ARRAY)]
    )
    def test_bad_values(self, text, sort):
        """Text that is not a value of the sort is a kind error."""
        with pytest.raises(KindError):
            parse_value(text, sort)

    def test_format(self):
        """Booleans are lower case and arrays use brackets."""
        assert format_value(True) == "true"
        assert format_value((1, 2)) == "[1, 2]"
        assert format_value(7) == "7"
        assert format_value(UNDEFINED) == "undefined"

    def test_definedness_order(self):
        """Undefined is below everything; defined values only below themselves."""
        assert defined_leq(UNDEFINED, 3)
        assert defined_leq(3, 3)
        assert not defined_leq(3, 4)
        assert not defined_leq(1, True)


class TestBuiltins:
    """The shipped primitives and the registry."""

    def test_hoare_partition(self):
        """Partition splits around the first element and returns the split point."""
        assert hoare_partition((3, 1, 2), 1, 3) == ((2, 1, 3), 2)
        assert hoare_partition((5, 4), 2, 1) == ((5, 4), 2)

    def test_partition_postcondition(self):
        """Every element left of the split is at most every element right of it."""
        array, q = hoare_partition((4, 1, 3, 2, 4, 1), 1, 6)
        assert 1 <= q < 6
        assert max(array[:q]) <= min(array[q:])
        assert sorted(array) == [1, 1, 2, 3, 4, 4]

    def test_registry(self):
        """Names are unique and a frozen registry takes no new entries."""
        registry = BuiltinRegistry()
        registry.register("twice", "(in int, out int)", lambda a: (None, 2 * a[0]))
        with pytest.raises(DuplicateBuiltin):
            registry.register("twice", "(in int, out int)", lambda a: (None, a[0]))
        with pytest.raises(DuplicateBuiltin):
            registry.register("odd", "(inout int)", lambda a: a, EffectSummary(psi_effect="explode"))
        registry.freeze()
        with pytest.raises(DuplicateBuiltin):
            registry.register("thrice", "(in int, out int)", lambda a: (None, 3 * a[0]))
        assert "twice" in registry

    def test_default_registry_is_frozen(self):
        """The shipped registry takes no new entries; a copy of it does."""
        with pytest.raises(DuplicateBuiltin):
            register_builtin("triple", "(in int, out int)", lambda a: (None, 3 * a[0]))
        assert "triple" not in BUILTINS
        registry = default_registry().copy()
        register_builtin("triple", "(in int, out int)", lambda a: (None, 3 * a[0]), registry=registry)
        assert "triple" in registry

    def test_default_names(self):
        """The default registry covers the operator names used by the sample programs."""
        registry = default_registry()
        for name in ("0", "1", "=", "lt", "<", "-", "*", "+", "inc", "+1", "id", "get", "set", "len"):
            assert name in registry
        assert [b.name for b in registry] == sorted(b.name for b in registry)

    def test_custom_builtin_is_auto_bound(self):
        """A free procedure named after a builtin of the given registry is bound to it."""
        registry = default_registry().copy()
        registry.register("double", "(in int, out int)", lambda a: (None, 2 * a[0]))
        env = SigEnv.from_mapping({"double": "proc(in int, out int)", "a": "int", "b": "int"})
        term = parse("call double(a, b)", env)
        outcome = eval(term, Env.initial({env.get("a").var(): 4}), registry=registry)
        assert data_pairs(outcome)["b"] == DataSem(UNDEFINED, 8)
        assert data_pairs(outcome)["a"] == DataSem(4, 4)


class TestEval:
    """Evaluation of whole programs and single calls."""

    @pytest.mark.parametrize("n, expected", [(0, 1), (1, 1), (5, 120), (10, 3628800)])
    def test_factorial(self, factorial, n, expected):
        """f computes n!."""
        assert eval_call(factorial, "f", [n]) == {"v": expected}

    def test_factorial_diverges_on_negative(self, factorial):
        """Recursion that never reaches the base case runs out of fuel."""
        outcome = eval_call(factorial, "f", [-1])
        assert isinstance(outcome, Bottom)
        assert outcome.fuel_exhausted

    def test_fuel_limit(self, factorial):
        """A small unfolding limit cuts off deep but finite recursion."""
        outcome = eval_call(factorial, "f", [5], fuel=Fuel(max_unfoldings=3))
        assert isinstance(outcome, Bottom) and outcome.fuel_exhausted

    def test_int_range(self, factorial):
        """Results outside the integer range are undefined, not out of fuel."""
        outcome = eval_call(factorial, "f", [6], int_range=(-128, 127))
        assert isinstance(outcome, Bottom)
        assert not outcome.fuel_exhausted

    def test_quicksort(self, quicksort):
        """Quicksort sorts the given range in place."""
        assert eval_call(quicksort, "Quicksort", [(3, 1, 2), 1, 3]) == {"A": (1, 2, 3)}
        assert eval_call(quicksort, "Quicksort", [(4, 2, 3, 1), 2, 4]) == {"A": (4, 1, 2, 3)}

    def test_quicksort_empty_range(self, quicksort):
        """With p >= r the array is returned unchanged."""
        assert eval_call(quicksort, "Quicksort", [(2, 1), 2, 1]) == {"A": (2, 1)}

    def test_update(self, update):
        """Update increments A[1..n]."""
        assert eval_call(update, "Update", [(10, 20, 30), 3]) == {"A": (11, 21, 31)}
        assert eval_call(update, "Update", [(10, 20, 30), 1]) == {"A": (11, 20, 30)}

    def test_update_out_of_bounds(self, update):
        """An index past the end makes the call undefined."""
        outcome = eval_call(update, "Update", [(10, 20, 30), 4])
        assert isinstance(outcome, Bottom) and not outcome.fuel_exhausted

    def test_entry_errors(self, factorial):
        """Unknown entries and wrong input counts are reported."""
        with pytest.raises(MissingInput):
            eval_call(factorial, "g", [1])
        with pytest.raises(MissingInput):
            eval_call(factorial, "f", [1, 2])

    def test_missing_input(self, scalars):
        """Every input needs a value."""
        with pytest.raises(MissingInput):
            eval(parse("call inc(a, b)", scalars), Env())

    def test_undefined_condition(self, scalars):
        """Branching on an unassigned local is bottom."""
        term = parse("var w; if w then call inc(a, b) fi", scalars)
        outcome = eval(term, Env.initial({scalars.get("a").var(): 1, scalars.get("b").var(): 0}))
        assert isinstance(outcome, Bottom)
        assert "condition w" in outcome.reason

    def test_fix_knot(self, scalars):
        """A procedure defined under fix can be called after it."""
        term = parse("fix u as p in proc p(x, y); call inc(x, y) end p end; call p(a, b)", scalars)
        outcome = eval(term, Env.initial({scalars.get("a").var(): 2}))
        assert data_pairs(outcome)["b"].fin == 3

    def test_primitive_ticks_psi(self, scalars):
        """A ticking primitive advances psi and needs a builtin."""
        term = parse("call bump(a)", scalars)
        env = Env.initial({scalars.get("a").var(): 1})
        with pytest.raises(UnboundPrimitive):
            eval(term, env)
        registry = default_registry().copy()
        registry.register("bump", "(inout int)", lambda a: (a[0] + 1,))
        outcome = eval(term, env, registry=registry)
        assert data_pairs(outcome)["a"] == DataSem(1, 2)
        assert outcome.psi == DataSem(0, 1)

    def test_fragment_has_no_meaning(self, scalars):
        """Fragments must be instantiated before running."""
        with pytest.raises(UnboundFragment):
            eval(parse("frag X(a, c)", scalars), Env.initial({scalars.get("a").var(): 1}))


class TestSampleOracles:
    """The sample programs against direct Python definitions, on every small input."""

    def test_quicksort_sorts_every_small_array(self, quicksort):
        """Every array of up to five values in 1..5 comes back as sorted() would return it."""
        for array in values_of_sort(Sort.INT_ARRAY, Domain(array_max=5, array_values=(1, 5))):
            result = eval_call(quicksort, "Quicksort", [array, 1, len(array)])
            assert result == {"A": tuple(sorted(array))}, array
            out = result["A"]
            assert Counter(out) == Counter(array)
            assert all(left <= right for left, right in zip(out, out[1:]))

    def test_quicksort_sorts_every_subrange(self, quicksort):
        """Only A[p..r] is sorted; the rest of the array is untouched."""
        for array in values_of_sort(Sort.INT_ARRAY, Domain(array_max=4, array_values=(1, 4))):
            for p in range(1, len(array) + 1):
                for r in range(p, len(array) + 1):
                    expected = array[: p - 1] + tuple(sorted(array[p - 1 : r])) + array[r:]
                    assert eval_call(quicksort, "Quicksort", [array, p, r]) == {"A": expected}, (array, p, r)

    def test_update_every_small_array(self, update):
        """Update adds one to A[1..n] for every n up to the length and is undefined past it."""
        for array in values_of_sort(Sort.INT_ARRAY, Domain(array_max=6, array_values=(1, 3))):
            for n in range(len(array) + 2):
                result = eval_call(update, "Update", [array, n])
                if n > len(array):
                    assert isinstance(result, Bottom) and not result.fuel_exhausted, (array, n)
                else:
                    expected = tuple(v + 1 for v in array[:n]) + array[n:]
                    assert result == {"A": expected}, (array, n)


class TestKleeneChain:
    """Explicit fixpoint iteration."""

    def test_factorial_chain(self, factorial):
        """The chain of f stabilizes on the factorials within the domain."""
        chain = kleene_chain(factorial, "f", Domain(int_range=(-2, 6)))
        assert chain.converged
        assert len(chain) == 5
        assert chain.graphs[0].table == {}
        assert chain.limit.table == {
            (0, None): (None, 1),
            (1, None): (None, 1),
            (2, None): (None, 2),
            (3, None): (None, 6),
        }
        for lower, upper in zip(chain.graphs, chain.graphs[1:]):
            assert lower.leq(upper)

    def test_not_converged(self, factorial):
        """Too few steps leave the chain open."""
        chain = kleene_chain(factorial, "f", Domain(int_range=(-2, 6)), Fuel(max_unfoldings=2))
        assert not chain.converged
        assert len(chain) == 3

    def test_no_recursion(self, scalars):
        """Terms without recursion have no chain."""
        with pytest.raises(MissingInput):
            kleene_chain(parse("proc p(x, y); call inc(x, y) end p", scalars))


class TestDomain:
    """Finite domains and limits."""

    def test_describe(self):
        """describe lists the integer and array ranges."""
        assert Domain().describe() == "int:-128..127 array-len:0..3 array-values:1..4"

    @pytest.mark.parametrize(
        "kwargs",
        [{"int_range": (3, 1)}, {"array_values": (2, 1)}, {"array_max": 1, "array_min": 2}, {"array_min": -1}],
    )
    def test_bad_domain(self, kwargs):
        """Empty ranges are configuration errors."""
        with pytest.raises(ConfigError):
            Domain(**kwargs)

    def test_bad_fuel(self):
        """Fuel limits are positive."""
        with pytest.raises(ConfigError):
            Fuel(max_unfoldings=0)

    def test_arrays(self):
        """Arrays of every allowed length over the element range."""
        values = values_of_sort(Sort.INT_ARRAY, Domain(array_max=2, array_values=(1, 2)))
        assert len(values) == 7
        assert values[0] == ()


class TestEnumeration:
    """Finite-domain denotations."""

    def test_semantics_set(self, scalars):
        """Out-of-range results drop out of the set."""
        sems = semantics_set(parse("call inc(a, b)", scalars), Domain(int_range=(0, 2)))
        assert {data_pairs(env)["b"].fin for env in sems} == {1, 2}

    def test_too_large(self, scalars):
        """The enumeration limit guards the input space."""
        with pytest.raises(DomainTooLarge):
            semantics_set(parse("call inc(a, b)", scalars), Domain(), Fuel(max_enumeration=10))

    def test_free_procedure_needs_a_model(self, scalars):
        """A free procedure without builtin or model cannot be enumerated."""
        term = parse("call p(a, b)", scalars)
        with pytest.raises(MissingInput):
            semantics_set(term, Domain(int_range=(0, 2)))
        registry = default_registry()
        models = {"p": [registry.lookup("inc").intrinsic(), registry.lookup("id").intrinsic()]}
        assert len(semantics_set(term, Domain(int_range=(0, 2)), models=models, significant_only=True)) == 5


class TestRenaming:
    """Denotations do not depend on the names of data variables."""

    @given(fragment_free_programs(max_leaves=6), renamings())
    def test_eval_commutes_with_renaming(self, text, pairs):
        """Evaluating PΘ on the renamed input gives the renamed outcome."""
        term = parse(text, scalar_signatures())
        theta = substitution(pairs)
        renamed = apply_subst(term, theta)
        registry, models = scalar_world()
        data_vars = var_sets(term).data
        for env in input_space(term, SMALL, Fuel(), models, registry=registry):
            outcome = eval(term, env, registry=registry, int_range=SMALL.int_range)
            image = eval(renamed, env.renamed(theta), registry=registry, int_range=SMALL.int_range)
            if isinstance(outcome, Bottom):
                assert isinstance(image, Bottom)
            else:
                assert isinstance(image, Env)
                assert image.restrict(theta(v) for v in data_vars) == outcome.restrict(data_vars).renamed(theta)

    @settings(max_examples=300)
    @given(fragment_free_programs(max_leaves=6), substitutions())
    def test_legal_substitution_pulls_back(self, text, pairs):
        """Every outcome of PΘ, read through Θ, is an outcome of P."""
        term = parse(text, scalar_signatures())
        theta = substitution(pairs)
        assume(not check_subst(term, theta))
        registry, models = scalar_world()
        data_vars = var_sets(term).data
        image = semantics_set(apply_subst(term, theta), SMALL, models=models, registry=registry)
        original = project(semantics_set(term, SMALL, models=models, registry=registry), data_vars)
        assert {env.pullback(theta, data_vars) for env in image} <= original


class TestComposePhi:
    """Merging the environments of two consecutive parts."""

    def test_chain(self, scalars):
        """Shared data chains the first final value into the second initial one."""
        a = scalars.get("a").var()
        first, second = parse("call inc(a, b)", scalars), parse("call id(b, a)", scalars)
        merged = compose_phi(Env({a: DataSem(1, 2)}), Env({a: DataSem(2, 3)}), first, second)
        assert merged[a] == DataSem(1, 3)

    def test_broken_chain(self, scalars):
        """Values that do not meet violate the precondition."""
        a = scalars.get("a").var()
        first, second = parse("call inc(a, b)", scalars), parse("call id(b, a)", scalars)
        with pytest.raises(PhiPrecondViolated):
            compose_phi(Env({a: DataSem(1, 2)}), Env({a: DataSem(3, 4)}), first, second)
