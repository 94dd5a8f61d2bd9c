import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Generic, List, Optional, TypeVar

from app.exceptions import InvalidValueError
from app.taxonomy.model import SourceSpan

RULE_ID_RE = re.compile(r"^[RPC][0-9]{3}$")

T = TypeVar("T")


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"

    @property
    def rank(self) -> int:
        return {"info": 0, "warning": 1, "error": 2}[self.value]

    def at_least(self, threshold: "Severity") -> bool:
        return self.rank >= Severity(threshold).rank


# Códigos del parser
MISSING_FIELDS = "P001"
INVALID_SAE_LEVEL = "P002"
INVALID_TOKEN = "P003"
TRAILING_GARBAGE = "P004"
EMPTY_FIELD = "P005"
INVALID_ADRL = "P006"

# Códigos de carga de catálogos
DUPLICATE_ENTRY = "C001"
SKIPPED_ENTRY = "C002"
MALFORMED_ENTRY = "C003"


@dataclass(frozen=True)
class Diagnostic:
    """Hallazgo del parser, del lint o del cargador de catálogos"""
    rule_id: str
    severity: Severity
    message: str
    span: Optional[SourceSpan] = None

    def __post_init__(self):
        if not RULE_ID_RE.match(self.rule_id):
            raise InvalidValueError(f"Identificador de regla inválido: {self.rule_id!r}")
        object.__setattr__(self, "severity", Severity(self.severity))

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self):
        if self.span is None:
            return (self.rule_id, -1, -1)
        return (self.rule_id, self.span.start, self.span.end)

    def render(self) -> str:
        text = f"{self.rule_id} {self.severity.value}: {self.message}"
        if self.span is not None:
            text += f" (at byte {self.span.start}..{self.span.end})"
        return text

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "severity": self.severity.value,
            "message": self.message,
            "span": None if self.span is None else {"start": self.span.start, "end": self.span.end},
        }


@dataclass(frozen=True)
class ParseResult(Generic[T]):
    value: Optional[T] = None
    diagnostics: List[Diagnostic] = field(default_factory=list)

    def __post_init__(self):
        if self.value is None and not self.has_errors:
            raise InvalidValueError("Un resultado sin valor debe llevar al menos un error")

    @property
    def has_errors(self) -> bool:
        return any(d.is_error for d in self.diagnostics)

    @property
    def ok(self) -> bool:
        return self.value is not None and not self.has_errors
