"""Reference denotational interpreter over finite domains."""

from .builtins import BUILTINS, Builtin, BuiltinRegistry, default_registry, hoare_partition, register_builtin
from .enumeration import InputSpace, data_pairs, input_space, project, run_all, semantics_set, values_of_sort
from .evaluator import Machine, compose_phi, eval, eval_call, find_definition
from .fixpoint import KleeneChain, kleene_chain
from .semantics import (
    Bottom,
    Closure,
    DataSem,
    Domain,
    Env,
    Fuel,
    Graph,
    Intrinsic,
    Knot,
    ProcSem,
    Undefined,
)
from .values import UNDEFINED, UNIT, defined_leq, format_value, is_defined, parse_value, value_matches

__all__ = [
    "BUILTINS",
    "Builtin",
    "BuiltinRegistry",
    "default_registry",
    "hoare_partition",
    "register_builtin",
    "InputSpace",
    "data_pairs",
    "input_space",
    "project",
    "run_all",
    "semantics_set",
    "values_of_sort",
    "Machine",
    "compose_phi",
    "eval",
    "eval_call",
    "find_definition",
    "KleeneChain",
    "kleene_chain",
    "Bottom",
    "Closure",
    "DataSem",
    "Domain",
    "Env",
    "Fuel",
    "Graph",
    "Intrinsic",
    "Knot",
    "ProcSem",
    "Undefined",
    "UNDEFINED",
    "UNIT",
    "defined_leq",
    "format_value",
    "is_defined",
    "parse_value",
    "value_matches",
]
