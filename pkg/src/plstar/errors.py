"""
Exception taxonomy for plstar.

Every error carries a stable ``code`` used in CLI output and server replies,
and optionally the source span it refers to.
"""

from typing import Any, Optional


class PlstarError(Exception):
    """Base class for all plstar errors."""

    code = "PlstarError"

    def __init__(self, message: str, span: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def to_dict(self) -> dict:
        result = {"code": self.code, "message": self.message}
        if self.span is not None:
            result["line"] = self.span.line
            result["column"] = self.span.column
        return result


class IRError(PlstarError):
    code = "IRError"


class KindMismatch(PlstarError):
    code = "KindMismatch"


class PsiViolation(PlstarError):
    code = "PsiViolation"


class UnboundFragment(PlstarError):
    code = "UnboundFragment"


class VarArityMismatch(PlstarError):
    code = "VarArityMismatch"


class VarAlreadyPresent(PlstarError):
    code = "VarAlreadyPresent"


class PlSyntaxError(PlstarError):
    code = "SyntaxError"


class UndeclaredIdentifier(PlstarError):
    code = "UndeclaredIdentifier"


class KindError(PlstarError):
    code = "KindError"


class MissingInput(PlstarError):
    code = "MissingInput"


class PrecondViolation(PlstarError):
    code = "PrecondViolation"


class PhiPrecondViolated(PlstarError):
    code = "PhiPrecondViolated"


class DomainTooLarge(PlstarError):
    code = "DomainTooLarge"


class DuplicateBuiltin(PlstarError):
    code = "DuplicateBuiltin"


class NoLeastSolution(PlstarError):
    code = "NoLeastSolution"


class UnknownVariable(PlstarError):
    code = "UnknownVariable"


class UnknownRulePayload(PlstarError):
    code = "UnknownRulePayload"


class OracleRefused(PlstarError):
    code = "OracleRefused"


class NotExtractable(PlstarError):
    code = "NotExtractable"


class UnboundPrimitive(PlstarError):
    code = "UnboundPrimitive"


class UnsupportedSort(PlstarError):
    code = "UnsupportedSort"


class UnsupportedConstruct(PlstarError):
    code = "UnsupportedConstruct"


class DuplicateBackend(PlstarError):
    code = "DuplicateBackend"


class UnknownBackend(PlstarError):
    code = "UnknownBackend"


class ToolchainMissing(PlstarError):
    code = "ToolchainMissing"


class ExecutionError(PlstarError):
    code = "ExecutionError"


class ConfigError(PlstarError):
    code = "ConfigError"
