"""
Command-line entry point for plstar.
"""

import argparse
import json
import os
import sys
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from loguru import logger

from .analysis.diagnostics import sort_diagnostics
from .analysis.preconditions import check_preconditions
from .analysis.varsets import var_sets
from .codegen.crosscheck import crosscheck
from .codegen.emitter import backend_ids, emit
from .errors import MissingInput, PlstarError, ToolchainMissing
from .interp.enumeration import values_of_sort
from .interp.evaluator import eval_call, find_definition
from .interp.semantics import Bottom
from .interp.values import format_value, parse_value
from .ir.terms import ProcDef, Term, subterms
from .ir.typesig import DataKind
from .parser.parser import load_program
from .parser.printer import print_term
from .resources.schemas import PlstarConfig
from .utils.config import load_config, merge_overrides, overlay_domain, parse_domain_flag
from .verify.checker import Oracle
from .verify.extraction import extract_program
from .verify.prooffile import load_proof

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)


def setup_logging(default_level: str = "WARNING", verbose: bool = False) -> None:
    """Configure logging: one stderr sink, level from ``LOG_LEVEL``."""
    logger.remove()
    level = "DEBUG" if verbose else os.getenv("LOG_LEVEL", default_level)
    logger.add(sys.stderr, level=level, format=LOG_FORMAT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plstar", description="Abstract PL programs: check, run, emit and verify.")
    parser.add_argument("--config", help="configuration file (default: ./plstar.toml)")
    parser.add_argument("--json", action="store_true", help="one JSON object per output line")
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def program_command(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", type=Path, help="PL program (.pl)")
        p.add_argument("--signatures", help="signature file (default: the sidecar .sig)")
        return p

    check = program_command("check", "report precondition diagnostics")
    check.add_argument("--implicit-padding", action="store_true", default=None, help="accept data set mismatches across ';'")

    run = program_command("run", "evaluate a procedure of the program")
    run.add_argument("--entry", help="procedure to call (default: the last one defined)")
    run.add_argument("--args", nargs="*", default=[], help="one value per read parameter")
    run.add_argument("--fuel", type=int, help="recursive unfoldings before the run counts as diverging")
    run.add_argument("--domain", action="append", default=[], help="e.g. int:-8..8; integer results outside are undefined")

    emit_cmd = program_command("emit", "translate the program for a backend")
    emit_cmd.add_argument("--backend", help="backend id")
    emit_cmd.add_argument("--name", help="unit name (default: the file stem)")
    emit_cmd.add_argument("-o", "--output", type=Path, help="write here instead of stdout")

    cross = program_command("crosscheck", "compare emitted C with the interpreter")
    cross.add_argument("--entry", help="procedure to call (default: the unit entry)")
    cross.add_argument(
        "--vector",
        action="append",
        default=[],
        help="whitespace-separated inputs; repeatable (default: every input in the domain)",
    )
    cross.add_argument("--toolchain", help="auto, off, or a compiler command")
    cross.add_argument("--domain", action="append", default=[], help="e.g. int:0..10, array-len:0..4")

    fmt = program_command("fmt", "print the program in canonical form")
    fmt.add_argument("--mu-as-subst", action="store_true", default=None)

    verify = sub.add_parser("verify", help="check a proof file")
    verify.add_argument("file", type=Path, help="proof (.plp)")
    verify.add_argument("--oracle", choices=["brute-force", "assumed"])
    verify.add_argument("--domain", action="append", default=[], help="override entries of the proof's domain, e.g. int:0..3")
    verify.add_argument("--extract", action="store_true", help="print the extracted program when accepted")

    serve = sub.add_parser("serve", help="start the tool server")
    serve.add_argument("--transport", choices=["stdio", "streamable-http"], default="stdio")
    return parser


def _emit_line(args: argparse.Namespace, text: str, record: Dict[str, Any]) -> None:
    print(json.dumps(record, sort_keys=True) if args.json else text)


def _domain_overrides(flags: Sequence[str]) -> Optional[Dict[str, int]]:
    if not flags:
        return None
    merged: Dict[str, int] = {}
    for flag in flags:
        merged.update(parse_domain_flag(flag))
    return merged


def _config(args: argparse.Namespace) -> PlstarConfig:
    config = load_config(args.config)
    toolchain = getattr(args, "toolchain", None)
    return merge_overrides(
        config,
        {
            "domain": _domain_overrides(getattr(args, "domain", [])),
            "fuel": {"max_unfoldings": getattr(args, "fuel", None)},
            "implicit_padding": getattr(args, "implicit_padding", None),
            "mu_as_subst": getattr(args, "mu_as_subst", None),
            "backend": getattr(args, "backend", None),
            "oracle": getattr(args, "oracle", None),
            "toolchain": toolchain if toolchain in ("auto", "off") else None,
        },
    )


def _load(args: argparse.Namespace, config: PlstarConfig) -> Term:
    term, _ = load_program(args.file, args.signatures or config.signatures)
    return term


def _entry(term: Term, entry: Optional[str]) -> ProcDef:
    if entry is not None:
        definition = find_definition(term, entry)
        if definition is None:
            raise MissingInput(f"program defines no procedure {entry}")
        return definition
    defs = [t for t in subterms(term) if isinstance(t, ProcDef)]
    if not defs:
        raise MissingInput("program defines no procedure to run")
    return defs[-1]


def _read_values(definition: ProcDef, texts: Sequence[str]) -> List[Any]:
    sig = definition.proc.sig
    sorts = [arg.kind.sort for arg in sig.args if arg.io.reads and isinstance(arg.kind, DataKind)]
    if len(texts) != len(sorts):
        raise MissingInput(f"{definition.proc.name} takes {len(sorts)} inputs, got {len(texts)}")
    return [parse_value(t, s) for t, s in zip(texts, sorts)]


def _names(vars_) -> List[str]:
    return sorted(v.name for v in vars_)


def cmd_check(args: argparse.Namespace, config: PlstarConfig) -> int:
    term = _load(args, config)
    found = sort_diagnostics(check_preconditions(term, config.implicit_padding))
    for d in found:
        _emit_line(args, d.format(str(args.file)), d.to_dict(str(args.file)))
    if found:
        return 1
    sets = var_sets(term)
    _emit_line(
        args,
        f"ok: inputs {' '.join(_names(sets.inputs)) or '-'}; outputs {' '.join(_names(sets.outputs)) or '-'}",
        {"status": "ok", "inputs": _names(sets.inputs), "outputs": _names(sets.outputs)},
    )
    return 0


def cmd_run(args: argparse.Namespace, config: PlstarConfig) -> int:
    term = _load(args, config)
    definition = _entry(term, args.entry)
    values = _read_values(definition, args.args)
    result = eval_call(
        term, definition.proc.name, values, config.fuel.to_fuel(), int_range=config.domain.to_domain().int_range
    )
    if isinstance(result, Bottom):
        reason = "fuel exhausted" if result.fuel_exhausted else result.reason
        _emit_line(args, f"undefined: {reason}", {"status": "undefined", "reason": reason})
        return 1
    for name, value in result.items():
        _emit_line(args, f"{name} = {format_value(value)}", {"name": name, "value": format_value(value)})
    return 0


def cmd_emit(args: argparse.Namespace, config: PlstarConfig) -> int:
    term = _load(args, config)
    unit = emit(term, config.backend, args.name or args.file.stem)
    if args.output is not None:
        args.output.write_text(unit.text, encoding="utf-8")
        _emit_line(args, f"wrote {args.output}", {"file": str(args.output), "entry": unit.entry})
    else:
        sys.stdout.write(unit.text)
    return 0


def _all_vectors(definition: ProcDef, config: PlstarConfig) -> List[Tuple[Any, ...]]:
    domain = config.domain.to_domain()
    sig = definition.proc.sig
    spaces = [values_of_sort(arg.kind.sort, domain) for arg in sig.args if arg.io.reads and isinstance(arg.kind, DataKind)]
    vectors = list(product(*spaces))
    if len(vectors) > config.fuel.max_enumeration:
        raise MissingInput(f"{len(vectors)} vectors exceed the enumeration limit; pass --vector or a smaller --domain")
    return vectors


def cmd_crosscheck(args: argparse.Namespace, config: PlstarConfig) -> int:
    term = _load(args, config)
    definition = _entry(term, args.entry)
    if args.vector:
        vectors = [tuple(_read_values(definition, v.split())) for v in args.vector]
    else:
        vectors = _all_vectors(definition, config)
    toolchain = args.toolchain or config.toolchain
    try:
        report = crosscheck(
            term,
            "c",
            vectors,
            definition.proc.name,
            toolchain,
            config.fuel.to_fuel(),
            int_range=config.domain.to_domain().int_range,
        )
    except ToolchainMissing as e:
        logger.info(f"Skipping crosscheck: {e.message}")
        _emit_line(args, f"skipped: {e.message}", {"status": "skipped", "message": e.message})
        return 0
    if args.json:
        _emit_line(args, "", report.to_dict())
    else:
        for line in report.lines():
            print(line)
    return 0 if report.ok else 1


def cmd_fmt(args: argparse.Namespace, config: PlstarConfig) -> int:
    term = _load(args, config)
    sys.stdout.write(print_term(term, config.mu_as_subst))
    return 0


def cmd_verify(args: argparse.Namespace, config: PlstarConfig) -> int:
    proof = load_proof(args.file)
    # flags override only the entries they name
    domain = overlay_domain(proof.domain, _domain_overrides(args.domain) or {})
    if config.oracle == "assumed":
        oracle = Oracle.assumed("assumed-oracle")
    else:
        oracle = proof.oracle(domain)
    report = proof.check(oracle)
    if args.json:
        _emit_line(args, "", report.to_dict())
    else:
        for line in report.lines():
            print(line)
    if report.accepted and args.extract:
        sys.stdout.write(print_term(extract_program(proof.tree)))
    return 0 if report.accepted else 1


def cmd_serve(args: argparse.Namespace, config: PlstarConfig) -> int:
    from .server import mcp

    setup_logging("INFO", args.verbose)
    logger.info(f"Starting plstar server ({args.transport})")
    try:
        if args.transport == "streamable-http":
            port = int(os.getenv("PORT", "8080"))
            host = os.getenv("HOST", "127.0.0.1")
            logger.info(f"Server starting on {host}:{port}")
            mcp.run(transport="streamable-http", host=host, port=port)
        else:
            mcp.run(transport="stdio")
    except KeyboardInterrupt:
        logger.info("Server stopped by user")
    return 0


COMMANDS = {
    "check": cmd_check,
    "run": cmd_run,
    "emit": cmd_emit,
    "crosscheck": cmd_crosscheck,
    "fmt": cmd_fmt,
    "verify": cmd_verify,
    "serve": cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the plstar command."""
    args = build_parser().parse_args(argv)
    setup_logging(verbose=args.verbose)
    if getattr(args, "backend", None) is not None and args.backend not in backend_ids():
        print(f"plstar: unknown backend {args.backend}; available: {', '.join(backend_ids())}", file=sys.stderr)
        return 2
    try:
        config = _config(args)
        return COMMANDS[args.command](args, config)
    except PlstarError as e:
        logger.debug(f"{args.command} failed: {e.message}")
        if args.json:
            print(json.dumps(e.to_dict(), sort_keys=True))
        else:
            print(f"plstar: {e.code}: {e.message}", file=sys.stderr)
        return 1
    except OSError as e:
        logger.debug(f"{args.command} failed: {e}")
        print(f"plstar: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
