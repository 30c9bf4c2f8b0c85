"""
Differential testing of emitted code against the reference interpreter.

The emitted unit and a generated harness are compiled with the host C
compiler, run once over every test vector, and each vector's printed
outputs are compared with ``eval_call`` on the same inputs.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from loguru import logger

from ..errors import ExecutionError, ToolchainMissing, UnsupportedConstruct
from ..interp.builtins import BuiltinRegistry
from ..interp.evaluator import eval_call
from ..interp.semantics import Bottom, Fuel
from ..interp.values import format_value
from ..ir.terms import Term
from .backends import Backend
from .emitter import emit, get_backend

COMPILERS = ("cc", "gcc", "clang")
SEPARATOR = "--"


@dataclass(frozen=True)
class Mismatch:
    vector: tuple
    expected: List[str]
    actual: List[str]

    def to_dict(self) -> Dict[str, Any]:
        return {"vector": [format_value(v) for v in self.vector], "expected": self.expected, "actual": self.actual}


@dataclass
class CrossReport:
    """Outcome of one crosscheck run; vectors on which the interpreter diverges are skipped."""

    entry: str
    backend: str
    checked: int = 0
    skipped: int = 0
    mismatches: List[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def lines(self) -> List[str]:
        status = "match" if self.ok else "MISMATCH"
        out = [f"{status}: {self.entry} on {self.backend}, {self.checked} vectors checked, {self.skipped} skipped"]
        for m in self.mismatches:
            args = ", ".join(format_value(v) for v in m.vector)
            out.append(f"  ({args}): expected {'; '.join(m.expected)} got {'; '.join(m.actual)}")
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "entry": self.entry,
            "backend": self.backend,
            "ok": self.ok,
            "checked": self.checked,
            "skipped": self.skipped,
            "mismatches": [m.to_dict() for m in self.mismatches],
        }


def find_compiler() -> str:
    """The ``CC`` environment variable, else the first of cc, gcc, clang on PATH.

    Raises:
        ToolchainMissing: no compiler found
    """
    override = os.environ.get("CC")
    if override:
        found = shutil.which(override)
        if found:
            return found
        raise ToolchainMissing(f"CC={override} is not an executable")
    for name in COMPILERS:
        found = shutil.which(name)
        if found:
            return found
    raise ToolchainMissing(f"no C compiler found (tried {', '.join(COMPILERS)})")


def _expected_lines(outputs: Dict[str, Any]) -> List[str]:
    # the harness prints bools as C ints
    return [f"{name} = {format_value(int(v) if isinstance(v, bool) else v)}" for name, v in outputs.items()]


def _run(compiler: str, source: str, timeout: float) -> str:
    with tempfile.TemporaryDirectory(prefix="plstar-") as tmp:
        src = Path(tmp) / "crosscheck.c"
        exe = Path(tmp) / "crosscheck"
        src.write_text(source, encoding="utf-8")
        try:
            build = subprocess.run(
                [compiler, "-std=c99", "-O0", "-o", str(exe), str(src)],
                capture_output=True,
                text=True,
                timeout=timeout,
            )
        except subprocess.TimeoutExpired as e:
            raise ExecutionError(f"compiler timed out after {timeout}s") from e
        if build.returncode != 0:
            raise ExecutionError(f"compilation failed:\n{build.stderr.strip()}")
        try:
            result = subprocess.run([str(exe)], capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired as e:
            raise ExecutionError(f"emitted program timed out after {timeout}s") from e
        if result.returncode != 0:
            raise ExecutionError(f"emitted program exited with status {result.returncode}")
        return result.stdout


def crosscheck(
    term: Term,
    backend: Union[str, Backend],
    vectors: Sequence[Sequence[Any]],
    entry: Optional[str] = None,
    toolchain: str = "auto",
    fuel: Fuel = Fuel(),
    registry: Optional[BuiltinRegistry] = None,
    timeout: float = 60.0,
    int_range: Optional[Tuple[int, int]] = None,
) -> CrossReport:
    """Compare the emitted program with the interpreter on every vector.

    Each vector holds one value per read parameter of ``entry`` (by default
    the unit's entry point). ``toolchain`` is ``auto``, ``off`` or a compiler
    command. Vectors whose interpreted run leaves ``int_range`` are
    skipped along with the diverging ones.

    Raises:
        ToolchainMissing: ``toolchain`` is ``off`` or no compiler is found
        ExecutionError: the emitted code failed to build or run
    """
    if isinstance(backend, str):
        backend = get_backend(backend)
    if backend.harness is None:
        raise UnsupportedConstruct(f"backend {backend.id} has no test harness")
    if toolchain == "off":
        raise ToolchainMissing("crosscheck disabled (toolchain = off)")
    compiler = find_compiler() if toolchain == "auto" else shutil.which(toolchain)
    if compiler is None:
        raise ToolchainMissing(f"{toolchain} is not an executable")

    unit = emit(term, backend)
    entry = entry or unit.entry
    if entry != unit.entry:
        raise UnsupportedConstruct(f"the harness calls the unit entry {unit.entry}, not {entry}")

    report = CrossReport(entry, backend.id)
    kept: List[tuple] = []
    expected: List[List[str]] = []
    for vector in vectors:
        outputs = eval_call(term, entry, list(vector), fuel, registry, int_range=int_range)
        if isinstance(outputs, Bottom):
            report.skipped += 1
            continue
        kept.append(tuple(vector))
        expected.append(_expected_lines(outputs))
    if not kept:
        logger.warning(f"No vectors left to crosscheck for {entry}")
        return report

    source = unit.text + "\n" + backend.harness(unit, term, kept)
    logger.info(f"Crosschecking {entry} on {len(kept)} vectors with {compiler}")
    stdout = _run(compiler, source, timeout)

    blocks: List[List[str]] = [[]]
    for line in stdout.splitlines():
        if line == SEPARATOR:
            blocks.append([])
        else:
            blocks[-1].append(line)
    blocks = blocks[:-1]
    if len(blocks) != len(kept):
        raise ExecutionError(f"harness printed {len(blocks)} results for {len(kept)} vectors")

    for vector, want, got in zip(kept, expected, blocks):
        report.checked += 1
        if want != got:
            report.mismatches.append(Mismatch(vector, want, got))
    if report.mismatches:
        logger.warning(f"{len(report.mismatches)} crosscheck mismatches for {entry}")
    return report
