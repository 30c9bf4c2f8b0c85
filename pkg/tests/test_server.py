"""
Test suite for the plstar tool server.
"""

import json

import pytest

from plstar import server

from .common import PROGRAMS, PROOFS

FACTORIAL = str(PROGRAMS / "factorial.pl")


def call(tool, *args, **kwargs):
    """Call a registered tool or resource through its underlying function."""
    return getattr(tool, "fn", tool)(*args, **kwargs)


@pytest.fixture(autouse=True)
def no_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


class TestProgramTools:
    """Test cases for the program tools."""

    def test_check_program(self):
        """Test checking a clean program."""
        result = call(server.check_program, FACTORIAL)
        assert result["success"] is True
        assert result["ok"] is True
        assert result["diagnostics"] == []
        assert result["outputs"] == ["f"]

    def test_check_program_with_diagnostics(self, tmp_path):
        """Test that diagnostics are reported, not raised."""
        program = tmp_path / "bad.pl"
        program.write_text("call inc(a, a)\n", encoding="utf-8")
        (tmp_path / "bad.sig").write_text('inc = "proc(in int, out int)"\na = "int"\n', encoding="utf-8")
        result = call(server.check_program, str(program))
        assert result["ok"] is False
        assert result["diagnostics"][0]["code"] == "AliasedOutputs"

    def test_run_program(self):
        """Test running factorial."""
        result = call(server.run_program, FACTORIAL, args=["5"])
        assert result["success"] is True
        assert result["entry"] == "f"
        assert result["outputs"] == {"v": "120"}

    def test_run_program_diverges(self):
        """Test that divergence is reported as undefined."""
        result = call(server.run_program, FACTORIAL, args=["-1"])
        assert result["defined"] is False
        assert result["reason"] == "fuel exhausted"

    def test_run_program_wrong_arguments(self):
        """Test argument count validation."""
        result = call(server.run_program, FACTORIAL)
        assert result["error"] is True
        assert "takes 1 inputs, got 0" in result["message"]

    def test_emit_program(self):
        """Test emitting C."""
        result = call(server.emit_program, str(PROGRAMS / "quicksort.pl"))
        assert result["success"] is True
        assert result["file_name"] == "quicksort.c"
        assert result["entry"] == "Quicksort"
        assert "void Quicksort(int *A, int p, int r)" in result["text"]

    def test_emit_program_unknown_backend(self):
        """Test that plstar errors carry their code."""
        result = call(server.emit_program, FACTORIAL, backend="fortran")
        assert result["error"] is True
        assert result["code"] == "UnknownBackend"
        assert result["file_path"] == FACTORIAL

    def test_nonexistent_file(self):
        """Test tools on a non-existent file."""
        result = call(server.check_program, "nonexistent.pl")
        assert result["error"] is True
        assert "File not found" in result["message"]


class TestVerifyProof:
    """Test cases for proof checking."""

    def test_accepted_with_extraction(self):
        """Test checking the successor proof and extracting its program."""
        result = call(server.verify_proof, str(PROOFS / "successor.plp"), extract=True)
        assert result["success"] is True
        assert result["proof"] == "successor"
        assert result["report"]["status"] == "Accepted"
        assert "call inc(y, z)" in result["program"]

    def test_assumed_oracle(self):
        """Test the assumed oracle."""
        result = call(server.verify_proof, str(PROOFS / "successor.plp"), oracle="assumed")
        assert result["report"]["assumed"] == ["assumed-oracle"]

    def test_invalid_oracle(self):
        """Test oracle validation."""
        result = call(server.verify_proof, str(PROOFS / "successor.plp"), oracle="guess")
        assert result["error"] is True
        assert "Invalid oracle" in result["message"]


class TestResources:
    """Test cases for resources and the health check."""

    def test_config_resource(self):
        """Test that the configuration is served as JSON."""
        config = json.loads(call(server.get_config))
        assert config["backend"] == "c"
        assert config["domain"]["int_min"] == -128

    def test_backends_resource(self):
        """Test that both backends are listed."""
        backends = json.loads(call(server.get_backends))
        assert set(backends) == {"c", "pseudo"}
        assert backends["c"]["crosscheck"] is True
        assert "Partition" in backends["c"]["primitives"]
        assert backends["pseudo"]["requires_bindings"] is False

    def test_health_check(self):
        """Test health check."""
        result = call(server.health_check)
        assert result["status"] == "healthy"
        assert result["backends"] == ["c", "pseudo"]
