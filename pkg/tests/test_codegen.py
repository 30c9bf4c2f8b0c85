"""
Tests for the backends: golden output, binding files and differential runs.
"""

import os
from pathlib import Path

import pytest

from plstar.codegen import (
    Backend,
    backend_ids,
    c_name,
    crosscheck,
    emit,
    find_compiler,
    get_backend,
    load_bindings,
    parse_bindings,
    register_backend,
    render_pseudo,
)
from plstar.errors import (
    ConfigError,
    DuplicateBackend,
    PrecondViolation,
    ToolchainMissing,
    UnboundFragment,
    UnboundPrimitive,
    UnknownBackend,
    UnsupportedConstruct,
)
from plstar.interp import Domain, values_of_sort
from plstar.ir import Sort
from plstar.parser import load_program, parse, print_term

from .common import GOLDEN, PROGRAMS

UPDATE_GOLDEN = os.environ.get("PLSTAR_UPDATE_GOLDEN") == "1"


def _program(name):
    term, _ = load_program(PROGRAMS / f"{name}.pl")
    return term


@pytest.mark.parametrize("golden_path", sorted((GOLDEN / "c").glob("*.c"), key=lambda path: path.name))
def test_c_output_matches_golden(golden_path: Path) -> None:
    unit = emit(_program(golden_path.stem), "c", name=golden_path.stem)
    if UPDATE_GOLDEN:
        golden_path.write_text(unit.text, encoding="utf-8")
    expected = golden_path.read_text(encoding="utf-8")

    assert unit.text.rstrip() == expected.rstrip()


@pytest.mark.parametrize("golden_path", sorted((GOLDEN / "pseudo").glob("*.pl"), key=lambda path: path.name))
def test_pseudo_output_matches_golden(golden_path: Path) -> None:
    unit = emit(_program(golden_path.stem), "pseudo", name=golden_path.stem)
    expected = golden_path.read_text(encoding="utf-8")

    assert unit.text.rstrip() == expected.rstrip()


class TestEmit:
    """Emission through both shipped backends."""

    def test_backend_ids(self):
        """Both backends are installed on first use."""
        assert backend_ids() == ["c", "pseudo"]

    def test_unknown_backend(self):
        """Unknown ids list what is available."""
        with pytest.raises(UnknownBackend) as info:
            get_backend("fortran")
        assert "c, pseudo" in info.value.message

    def test_pseudo_is_the_printer(self, factorial):
        """The pseudo backend emits canonical PL text and names the last definition as entry."""
        unit = emit(factorial, "pseudo", name="factorial")
        assert unit.text == print_term(factorial)
        assert unit.file_name == "factorial.pl"
        assert unit.entry == "f"

    def test_quicksort_in_c(self, quicksort):
        """Arrays pass as base pointers; the partition helper is emitted with its prelude."""
        unit = emit(quicksort, "c", name="quicksort")
        assert unit.file_name == "quicksort.c"
        assert unit.entry == "Quicksort"
        assert unit.text.startswith("/* quicksort: generated by plstar */\n")
        assert "static int pl_partition(int *a, int p, int r)" in unit.text
        assert "void Quicksort(int *A, int p, int r)\n{" in unit.text
        assert "    int q, x, y;" in unit.text
        assert "q = pl_partition(A, p, r);" in unit.text
        assert "Quicksort(A, y, r);" in unit.text

    def test_statement_level_program(self, scalars):
        """Statements outside any definition become a function named after the unit."""
        unit = emit(parse("call inc(a, b)", scalars), "c", name="step")
        assert unit.entry == "step"
        assert "void step(int a, int *b)" in unit.text
        assert "(*b) = a + 1;" in unit.text

    def test_deterministic(self, update):
        """The same program always yields the same text."""
        assert emit(update, "c", name="update") == emit(update, "c", name="update")

    def test_fragments_are_rejected(self, scalars):
        """Only concrete programs can be emitted."""
        with pytest.raises(UnboundFragment):
            emit(parse("frag X(a, c)", scalars), "pseudo")

    def test_preconditions_are_enforced(self, scalars):
        """Programs with precondition diagnostics are not emitted."""
        with pytest.raises(PrecondViolation):
            emit(parse("call inc(a, a)", scalars), "c")

    def test_unbound_primitive(self, scalars):
        """C needs a binding for every primitive; pseudo prints calls as they are."""
        term = parse("call bump(a)", scalars)
        with pytest.raises(UnboundPrimitive):
            emit(term, "c")
        assert emit(term, "pseudo").text == "call bump(a)\n"

    def test_captured_data(self, scalars):
        """C functions cannot capture data from an enclosing scope."""
        with pytest.raises(UnsupportedConstruct):
            emit(parse("proc p(x, y); call inc(a, y) end p", scalars), "c")


class TestBindings:
    """Binding files and the backend registry."""

    def test_shipped_c_bindings(self):
        """The C bindings cover every default builtin."""
        bindings = load_bindings("c")
        assert bindings.extension == ".c"
        assert bindings.types["int-array"] == "int *"
        assert bindings.prims["inc"] == "{2} = {1} + 1;"
        assert "Partition" in bindings.prelude

    def test_slot_out_of_range(self):
        """Template slots must fit the primitive's arity."""
        with pytest.raises(ConfigError):
            parse_bindings('[prims]\ninc = "{3} = {1};"\n')

    def test_bad_toml(self):
        """Malformed files are configuration errors."""
        with pytest.raises(ConfigError):
            parse_bindings("[prims\n")

    def test_duplicate_backend(self):
        """Backend ids are unique."""
        get_backend("pseudo")
        with pytest.raises(DuplicateBackend):
            register_backend(Backend("pseudo", load_bindings("pseudo"), render_pseudo))

    @pytest.mark.parametrize(
        "name, expected", [("f", "f"), ("Quicksort", "Quicksort"), ("int", "pl_int"), ("+1", "pl__x2b1"), ("pl_q", "pl_pl_x5fq")]
    )
    def test_c_name(self, name, expected):
        """Keywords, operators and the reserved prefix are escaped."""
        assert c_name(name) == expected


class TestCrosscheck:
    """Emitted C against the interpreter."""

    def test_toolchain_off(self, factorial):
        """A disabled toolchain is reported, not ignored."""
        with pytest.raises(ToolchainMissing):
            crosscheck(factorial, "c", [[3]], toolchain="off")

    def test_pseudo_has_no_harness(self, factorial):
        """Only backends with a harness can be crosschecked."""
        with pytest.raises(UnsupportedConstruct):
            crosscheck(factorial, "pseudo", [[3]])

    def test_missing_compiler(self, monkeypatch):
        """An unusable CC is a missing toolchain."""
        monkeypatch.setenv("CC", "plstar-no-such-compiler")
        with pytest.raises(ToolchainMissing):
            find_compiler()

    def test_factorial(self, factorial):
        """Compiled factorial agrees with the interpreter; diverging vectors are skipped."""
        try:
            find_compiler()
        except ToolchainMissing:
            pytest.skip("no C compiler")
        report = crosscheck(factorial, "c", [[0], [1], [5], [-1]])
        assert report.ok, report.lines()
        assert (report.checked, report.skipped) == (3, 1)

    def test_quicksort(self, quicksort):
        """Compiled quicksort sorts like the interpreter."""
        try:
            find_compiler()
        except ToolchainMissing:
            pytest.skip("no C compiler")
        vectors = [[(3, 1, 2), 1, 3], [(2, 2, 1), 1, 3], [(4, 2, 3, 1), 2, 4]]
        report = crosscheck(quicksort, "c", vectors)
        assert report.ok, report.lines()
        assert report.checked == 3

    def test_quicksort_every_small_array(self, quicksort):
        """Compiled quicksort agrees with the interpreter on every array of up to five values in 1..5."""
        try:
            find_compiler()
        except ToolchainMissing:
            pytest.skip("no C compiler")
        arrays = values_of_sort(Sort.INT_ARRAY, Domain(array_max=5, array_values=(1, 5)))
        report = crosscheck(quicksort, "c", [[array, 1, len(array)] for array in arrays])
        assert report.ok, report.lines()[:5]
        assert (report.checked, report.skipped) == (len(arrays), 0)

    def test_update_every_small_array(self, update):
        """Compiled Update agrees with the interpreter wherever the interpreted run is defined."""
        try:
            find_compiler()
        except ToolchainMissing:
            pytest.skip("no C compiler")
        arrays = values_of_sort(Sort.INT_ARRAY, Domain(array_max=6, array_values=(1, 3)))
        vectors = [[array, n] for array in arrays for n in range(len(array) + 2)]
        report = crosscheck(update, "c", vectors)
        assert report.ok, report.lines()[:5]
        # n = len(A) + 1 is undefined for every array
        assert report.skipped == len(arrays)
