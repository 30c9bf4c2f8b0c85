"""
Core program representation: variables, signatures, terms and substitutions.
"""

from .sexpr import Quoted, read_sexpr, read_sexprs, to_sexpr
from .substitution import (
    FragmentBinding,
    Substitution,
    alpha_equal,
    apply_subst,
    canonical,
    free_vars,
    fresh_var,
    instantiate,
)
from .terms import (
    PSI,
    Cond,
    EffectSummary,
    Fix,
    Fragment,
    Local,
    Pad,
    Prim,
    ProcCall,
    ProcDef,
    Seq,
    Term,
    VarId,
    bound_vars,
    effect_from_sig,
    fragment_names,
    is_fragment_free,
    occurring_vars,
    seq,
    sorted_vars,
    subterms,
)
from .typesig import IO, ArgSig, DataKind, Kind, ProcKind, Sort, TypeSig, data, parse_kind, parse_typesig, proc

__all__ = [
    "PSI",
    "IO",
    "ArgSig",
    "Cond",
    "DataKind",
    "EffectSummary",
    "Fix",
    "Fragment",
    "FragmentBinding",
    "Kind",
    "Local",
    "Pad",
    "Prim",
    "ProcCall",
    "ProcDef",
    "ProcKind",
    "Quoted",
    "Seq",
    "Sort",
    "Substitution",
    "Term",
    "TypeSig",
    "VarId",
    "alpha_equal",
    "apply_subst",
    "bound_vars",
    "canonical",
    "data",
    "effect_from_sig",
    "fragment_names",
    "free_vars",
    "fresh_var",
    "instantiate",
    "is_fragment_free",
    "occurring_vars",
    "parse_kind",
    "parse_typesig",
    "proc",
    "read_sexpr",
    "read_sexprs",
    "seq",
    "sorted_vars",
    "subterms",
    "to_sexpr",
]
