"""
plstar

Language-abstract program fragments: a small imperative language whose terms
are built from procedure definition, application, composition, conditionals,
output deletion and least fixpoints. Programs are parsed, checked, run on an
exhaustive reference interpreter, verified with relational proofs and emitted
as C.
"""

__version__ = "0.1.0"

from .codegen.emitter import emit
from .errors import PlstarError
from .interp.evaluator import eval, eval_call
from .parser.parser import load_program, parse
from .parser.printer import print_term
from .verify.checker import check_proof
from .verify.prooffile import load_proof

__all__ = [
    "PlstarError",
    "check_proof",
    "emit",
    "eval",
    "eval_call",
    "load_program",
    "load_proof",
    "parse",
    "print_term",
]
