"""
Tests for the plstar command line.
"""

import json

import pytest

from plstar.__main__ import main

from .common import GOLDEN, PROGRAMS, PROOFS

FACTORIAL = str(PROGRAMS / "factorial.pl")


@pytest.fixture(autouse=True)
def no_config(tmp_path, monkeypatch):
    """Run every command outside the repository so plstar.toml defaults apply."""
    monkeypatch.chdir(tmp_path)


class TestCheck:
    def test_clean_program(self, capsys):
        """A clean program prints its inputs and outputs and exits 0."""
        assert main(["check", FACTORIAL]) == 0
        out = capsys.readouterr().out
        assert out.startswith("ok: inputs ")
        assert "outputs f" in out

    def test_diagnostics(self, tmp_path, capsys):
        """Each diagnostic is one line; any diagnostic exits 1."""
        program = tmp_path / "bad.pl"
        program.write_text("call inc(a, a)\n", encoding="utf-8")
        (tmp_path / "bad.sig").write_text('inc = "proc(in int, out int)"\na = "int"\n', encoding="utf-8")
        assert main(["check", str(program)]) == 1
        assert capsys.readouterr().out.startswith(f"AliasedOutputs {program}:1:1 ")

    def test_syntax_error(self, tmp_path, capsys):
        """Errors go to stderr with their code."""
        program = tmp_path / "broken.pl"
        program.write_text("call inc(a b)\n", encoding="utf-8")
        (tmp_path / "broken.sig").write_text('inc = "proc(in int, out int)"\na = "int"\nb = "int"\n', encoding="utf-8")
        assert main(["check", str(program)]) == 1
        assert "plstar: SyntaxError:" in capsys.readouterr().err

    def test_data_set_mismatch(self, tmp_path, capsys):
        """Mismatched data sets are reported unless --implicit-padding is given."""
        program = tmp_path / "pair.pl"
        program.write_text("call inc(a, b); call inc(c, d)\n", encoding="utf-8")
        (tmp_path / "pair.sig").write_text(
            'inc = "proc(in int, out int)"\na = "int"\nb = "int"\nc = "int"\nd = "int"\n', encoding="utf-8"
        )
        assert main(["check", str(program)]) == 1
        assert capsys.readouterr().out.startswith("DataSetMismatch ")
        assert main(["check", str(program), "--implicit-padding"]) == 0


class TestRun:
    def test_factorial(self, capsys):
        """Written parameters are printed as name = value."""
        assert main(["run", FACTORIAL, "--args", "5"]) == 0
        assert capsys.readouterr().out == "v = 120\n"

    def test_json(self, capsys):
        """--json prints one object per line."""
        assert main(["--json", "run", FACTORIAL, "--args", "5"]) == 0
        assert json.loads(capsys.readouterr().out) == {"name": "v", "value": "120"}

    def test_divergence(self, capsys):
        """A run that exhausts its fuel is undefined and exits 1."""
        assert main(["run", FACTORIAL, "--args", "-1"]) == 1
        assert capsys.readouterr().out == "undefined: fuel exhausted\n"

    def test_wrong_argument_count(self, capsys):
        assert main(["run", FACTORIAL]) == 1
        assert "takes 1 inputs, got 0" in capsys.readouterr().err

    def test_fuel_flag(self, capsys):
        """--fuel bounds the recursive unfoldings of the run."""
        assert main(["run", FACTORIAL, "--args", "5", "--fuel", "3"]) == 1
        assert capsys.readouterr().out == "undefined: fuel exhausted\n"

    def test_result_outside_the_domain(self, capsys):
        """Integer results outside the --domain range make the run undefined."""
        assert main(["run", FACTORIAL, "--args", "5", "--domain", "int:0..100"]) == 1
        assert capsys.readouterr().out == "undefined: call of * has no result\n"
        assert main(["run", FACTORIAL, "--args", "4", "--domain", "int:0..100"]) == 0
        assert capsys.readouterr().out == "v = 24\n"


class TestEmit:
    def test_pseudo_to_stdout(self, capsys):
        assert main(["emit", FACTORIAL, "--backend", "pseudo"]) == 0
        expected = (GOLDEN / "pseudo" / "factorial.pl").read_text(encoding="utf-8")
        assert capsys.readouterr().out == expected

    def test_c_to_file(self, tmp_path, capsys):
        """The unit is named after the file stem by default."""
        target = tmp_path / "factorial.c"
        assert main(["emit", FACTORIAL, "-o", str(target)]) == 0
        expected = (GOLDEN / "c" / "factorial.c").read_text(encoding="utf-8")
        assert target.read_text(encoding="utf-8").rstrip() == expected.rstrip()
        assert capsys.readouterr().out == f"wrote {target}\n"

    def test_unknown_backend(self, capsys):
        """An unknown backend is a usage error."""
        assert main(["emit", FACTORIAL, "--backend", "fortran"]) == 2
        assert "unknown backend fortran; available: c, pseudo" in capsys.readouterr().err


class TestOtherCommands:
    def test_fmt(self, capsys):
        assert main(["fmt", str(PROGRAMS / "quicksort.pl")]) == 0
        expected = (GOLDEN / "pseudo" / "quicksort.pl").read_text(encoding="utf-8")
        assert capsys.readouterr().out == expected

    def test_crosscheck_without_toolchain(self, capsys):
        """A disabled toolchain skips the run without failing."""
        assert main(["crosscheck", FACTORIAL, "--vector", "3", "--toolchain", "off"]) == 0
        assert capsys.readouterr().out.startswith("skipped: ")

    def test_verify(self, capsys):
        """An accepted proof prints its status and domain; --extract adds the program."""
        assert main(["verify", str(PROOFS / "successor.plp"), "--extract"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[:2] == ["Accepted", "domain: int:0..5 array-len:0..3 array-values:1..4"]
        assert "call inc(x, y);" in out

    def test_verify_domain_overlay(self, capsys):
        """--domain replaces only the named entries of the proof's own domain."""
        assert main(["verify", str(PROOFS / "successor.plp"), "--domain", "int:0..3"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[:2] == ["Accepted", "domain: int:0..3 array-len:0..3 array-values:1..4"]

    def test_verify_assumed(self, capsys):
        assert main(["--json", "verify", str(PROOFS / "successor.plp"), "--oracle", "assumed"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["status"] == "Accepted"
        assert report["assumed"] == ["assumed-oracle"]

    def test_missing_config(self, tmp_path, capsys):
        """An explicit --config must exist."""
        assert main(["--config", str(tmp_path / "none.toml"), "fmt", FACTORIAL]) == 1
        assert "plstar: ConfigError:" in capsys.readouterr().err
