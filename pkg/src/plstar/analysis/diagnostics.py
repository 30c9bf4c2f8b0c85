"""
Diagnostic records produced by the static checks and the proof checker.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple


class DiagnosticCode(str, Enum):
    SHARED_PROC_OUTPUT = "SharedProcOutput"
    DATA_SET_MISMATCH = "DataSetMismatch"
    FORMAL_IS_OUTER_OUTPUT = "FormalIsOuterOutput"
    SIDE_EFFECT_ON_CAPTURED_VAR = "SideEffectOnCapturedVar"
    FIX_VAR_KIND = "FixVarKind"
    PROC_REDEFINED = "ProcRedefined"
    DATA_USE_BEFORE_DEF = "DataUseBeforeDef"
    ARITY_MISMATCH = "ArityMismatch"
    SIG_MISMATCH = "SigMismatch"
    SCRUTINEE_NOT_DATA = "ScrutineeNotData"
    ALIASED_OUTPUTS = "AliasedOutputs"
    DUPLICATE_FORMAL = "DuplicateFormal"
    NOT_OUTPUT_INJECTIVE = "NotOutputInjective"
    DATA_IDENTIFIED = "DataIdentified"
    KIND_MISMATCH = "KindMismatch"
    PSI_VIOLATION = "PsiViolation"
    RULE_ARITY = "RuleArity"
    MISSING_PAYLOAD = "MissingPayload"
    VAR_LIST_MISMATCH = "VarListMismatch"
    TERM_MISMATCH = "TermMismatch"
    RELATION_MISMATCH = "RelationMismatch"
    SIDE_CONDITION_FAILED = "SideConditionFailed"
    SIDE_CONDITION_UNKNOWN = "SideConditionUnknown"
    ORACLE_REFUSED = "OracleRefused"


@dataclass(frozen=True)
class Diagnostic:
    """A single static finding, positioned when the term came from source."""

    code: DiagnosticCode
    message: str
    span: Optional[Any] = None
    related: Tuple[str, ...] = field(default=())

    @property
    def position(self) -> Tuple[int, int]:
        if self.span is None:
            return (0, 0)
        return (self.span.line, self.span.column)

    def format(self, path: str = "<input>") -> str:
        line, column = self.position
        return f"{self.code.value} {path}:{line}:{column} {self.message}"

    def to_dict(self, path: Optional[str] = None) -> Dict[str, Any]:
        line, column = self.position
        result: Dict[str, Any] = {
            "code": self.code.value,
            "message": self.message,
            "line": line,
            "column": column,
            "related": list(self.related),
        }
        if path is not None:
            result["path"] = path
        return result


def sort_diagnostics(diagnostics: Iterable[Diagnostic]) -> List[Diagnostic]:
    """Order by source position, then code and message; duplicates dropped."""
    unique = set(diagnostics)
    return sorted(unique, key=lambda d: (d.position, d.code.value, d.message, d.related))
