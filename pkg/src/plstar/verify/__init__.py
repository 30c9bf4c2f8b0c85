"""
Relational assertions over finite domains, proof checking and program extraction.
"""

from .checker import Checker, CheckReport, NodeVerdict, Oracle, check_proof, mutations
from .extraction import extract_program
from .holds import CounterExample, Unknown, Valid, Verdict, holds
from .library import LIBRARIES, basic_relations, load_libraries, quicksort_relations
from .models import MODELS, build_models
from .prooffile import ProofFile, load_proof, parse_proof
from .proofs import Judgment, ProofTree, Rule
from .relations import (
    ExistsAt,
    ForAll,
    Named,
    ProcRelation,
    RelContext,
    RelExpr,
    Relation,
    Select,
    WithEquality,
    normalize,
    relation_from_sexpr,
)

__all__ = [
    "Checker",
    "CheckReport",
    "NodeVerdict",
    "Oracle",
    "check_proof",
    "mutations",
    "extract_program",
    "CounterExample",
    "Unknown",
    "Valid",
    "Verdict",
    "holds",
    "LIBRARIES",
    "basic_relations",
    "load_libraries",
    "quicksort_relations",
    "MODELS",
    "build_models",
    "ProofFile",
    "load_proof",
    "parse_proof",
    "Judgment",
    "ProofTree",
    "Rule",
    "ExistsAt",
    "ForAll",
    "Named",
    "ProcRelation",
    "RelContext",
    "RelExpr",
    "Relation",
    "Select",
    "WithEquality",
    "normalize",
    "relation_from_sexpr",
]
