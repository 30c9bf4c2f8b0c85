"""
Static analyses: variable sets, argument types, operator preconditions.
"""

from .correspondence import CorrespondenceReport, check_correspondence
from .diagnostics import Diagnostic, DiagnosticCode, sort_diagnostics
from .preconditions import PreconditionChecker, check_preconditions, check_subst, pad_variables
from .varsets import VarSets, call_sets, type_of, var_sets

__all__ = [
    "CorrespondenceReport",
    "Diagnostic",
    "DiagnosticCode",
    "PreconditionChecker",
    "VarSets",
    "call_sets",
    "check_correspondence",
    "check_preconditions",
    "check_subst",
    "pad_variables",
    "sort_diagnostics",
    "type_of",
    "var_sets",
]
