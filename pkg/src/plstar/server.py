"""
FastMCP server exposing the plstar pipeline as tools.
Provides tools for checking, running and emitting PL programs and for checking proofs.
"""

import json
import os
from datetime import datetime
from typing import Any, Dict, List, Optional

from fastmcp import FastMCP
from loguru import logger

from . import __version__
from .analysis.diagnostics import sort_diagnostics
from .analysis.preconditions import check_preconditions
from .analysis.varsets import var_sets
from .codegen.crosscheck import find_compiler
from .codegen.emitter import backend_ids, emit, get_backend
from .errors import PlstarError
from .interp.evaluator import eval_call, find_definition
from .interp.semantics import Bottom
from .interp.values import format_value, parse_value
from .ir.terms import ProcDef, subterms
from .ir.typesig import DataKind
from .parser.parser import load_program
from .parser.printer import print_term
from .resources.schemas import PlstarConfig
from .utils.config import load_config
from .verify.checker import Oracle
from .verify.extraction import extract_program
from .verify.prooffile import load_proof

mcp = FastMCP("plstar", dependencies=["loguru", "pydantic"])


def _missing(file_path: str) -> Optional[Dict[str, Any]]:
    if not os.path.exists(file_path):
        return {"error": True, "message": f"File not found: {file_path}"}
    return None


def _failure(action: str, e: Exception, file_path: str) -> Dict[str, Any]:
    error_msg = f"{action} failed: {e.message if isinstance(e, PlstarError) else str(e)}"
    logger.error(error_msg)
    result: Dict[str, Any] = {"error": True, "message": error_msg, "file_path": file_path}
    if isinstance(e, PlstarError):
        result["code"] = e.code
    return result


@mcp.tool()
def check_program(file_path: str, signatures: Optional[str] = None, implicit_padding: bool = False) -> Dict[str, Any]:
    """
    Parse a PL program and report its precondition diagnostics and variable sets.

    Args:
        file_path: Path to the .pl program
        signatures: Optional signature file (defaults to the sidecar .sig)
        implicit_padding: Accept data set mismatches across ';' as padded

    Returns:
        Dictionary with the diagnostics and the program's inputs and outputs
    """
    logger.info(f"Checking program: {file_path}")
    if missing := _missing(file_path):
        return missing
    try:
        term, _ = load_program(file_path, signatures)
        diagnostics = sort_diagnostics(check_preconditions(term, implicit_padding))
        sets = var_sets(term)
        return {
            "success": True,
            "file_path": file_path,
            "ok": not diagnostics,
            "diagnostics": [d.to_dict(file_path) for d in diagnostics],
            "inputs": sorted(v.name for v in sets.inputs),
            "outputs": sorted(v.name for v in sets.outputs),
        }
    except Exception as e:
        return _failure("Check", e, file_path)


@mcp.tool()
def run_program(
    file_path: str, entry: Optional[str] = None, args: Optional[List[str]] = None, signatures: Optional[str] = None
) -> Dict[str, Any]:
    """
    Evaluate a procedure of a PL program with the reference interpreter.

    Args:
        file_path: Path to the .pl program
        entry: Procedure to call (defaults to the last one defined)
        args: One value per read parameter, e.g. ["5"] or ["[3, 1, 2]", "1", "3"]
        signatures: Optional signature file

    Returns:
        Dictionary mapping each written parameter to its final value
    """
    logger.info(f"Running program: {file_path}, entry: {entry}")
    if missing := _missing(file_path):
        return missing
    try:
        term, _ = load_program(file_path, signatures)
        definition = find_definition(term, entry) if entry else None
        if definition is None:
            defs = [t for t in subterms(term) if isinstance(t, ProcDef)]
            if entry or not defs:
                return {"error": True, "message": f"No procedure {entry or 'to run'} in {file_path}"}
            definition = defs[-1]
        sorts = [a.kind.sort for a in definition.proc.sig.args if a.io.reads and isinstance(a.kind, DataKind)]
        texts = args or []
        if len(texts) != len(sorts):
            return {"error": True, "message": f"{definition.proc.name} takes {len(sorts)} inputs, got {len(texts)}"}
        values = [parse_value(t, s) for t, s in zip(texts, sorts)]
        config = load_config()
        result = eval_call(term, definition.proc.name, values, config.fuel.to_fuel())
        if isinstance(result, Bottom):
            return {
                "success": True,
                "file_path": file_path,
                "entry": definition.proc.name,
                "defined": False,
                "reason": "fuel exhausted" if result.fuel_exhausted else result.reason,
            }
        return {
            "success": True,
            "file_path": file_path,
            "entry": definition.proc.name,
            "defined": True,
            "outputs": {name: format_value(v) for name, v in result.items()},
        }
    except Exception as e:
        return _failure("Run", e, file_path)


@mcp.tool()
def emit_program(
    file_path: str, backend: str = "c", name: Optional[str] = None, signatures: Optional[str] = None
) -> Dict[str, Any]:
    """
    Translate a checked PL program into a backend's source language.

    Args:
        file_path: Path to the .pl program
        backend: Backend id (see plstar://backends)
        name: Unit name (defaults to the file stem)
        signatures: Optional signature file

    Returns:
        Dictionary containing the emitted file name, entry point and text
    """
    logger.info(f"Emitting program: {file_path}, backend: {backend}")
    if missing := _missing(file_path):
        return missing
    try:
        term, _ = load_program(file_path, signatures)
        unit = emit(term, backend, name or os.path.splitext(os.path.basename(file_path))[0])
        return {
            "success": True,
            "file_path": file_path,
            "backend": backend,
            "file_name": unit.file_name,
            "entry": unit.entry,
            "text": unit.text,
        }
    except Exception as e:
        return _failure("Emission", e, file_path)


@mcp.tool()
def verify_proof(file_path: str, oracle: str = "brute-force", extract: bool = False) -> Dict[str, Any]:
    """
    Check a relational proof file (.plp).

    Args:
        file_path: Path to the proof file
        oracle: "brute-force" to enumerate side conditions, "assumed" to trust them
        extract: Also return the program extracted from an accepted proof

    Returns:
        Dictionary containing the verdict, assumed labels and per-node results
    """
    logger.info(f"Verifying proof: {file_path}, oracle: {oracle}")
    if missing := _missing(file_path):
        return missing
    if oracle not in ("brute-force", "assumed"):
        return {"error": True, "message": "Invalid oracle. Must be one of: ['brute-force', 'assumed']"}
    try:
        proof = load_proof(file_path)
        report = proof.check(Oracle.assumed("assumed-oracle") if oracle == "assumed" else None)
        result = {"success": True, "file_path": file_path, "proof": proof.name, "report": report.to_dict()}
        if extract and report.accepted:
            result["program"] = print_term(extract_program(proof.tree))
        logger.info(f"Proof {proof.name}: {report.status}")
        return result
    except Exception as e:
        return _failure("Verification", e, file_path)


@mcp.resource("plstar://config")
def get_config() -> str:
    """Get the configuration in effect (plstar.toml merged over defaults)."""
    try:
        config = load_config()
    except PlstarError as e:
        logger.warning(f"Falling back to default configuration: {e.message}")
        config = PlstarConfig()
    return json.dumps(config.model_dump(), indent=2)


@mcp.resource("plstar://backends")
def get_backends() -> str:
    """Get the registered backends and their bound primitives."""
    backends = {}
    for backend_id in backend_ids():
        backend = get_backend(backend_id)
        backends[backend_id] = {
            "extension": backend.bindings.extension,
            "requires_bindings": backend.bindings.requires_bindings,
            "primitives": sorted(backend.prim_bindings),
            "types": dict(backend.type_map),
            "crosscheck": backend.harness is not None,
        }
    return json.dumps(backends, indent=2)


@mcp.tool()
def health_check() -> Dict[str, Any]:
    """
    Perform a health check of the plstar service.

    Returns:
        Dictionary containing service health status
    """
    try:
        try:
            compiler = find_compiler()
        except PlstarError:
            compiler = None
        return {
            "status": "healthy",
            "service": "plstar",
            "version": __version__,
            "backends": backend_ids(),
            "c_compiler": compiler or "not_available",
            "timestamp": datetime.now().isoformat(),
        }
    except Exception as e:
        return {"status": "unhealthy", "error": str(e), "timestamp": datetime.now().isoformat()}


__all__ = ["mcp"]
