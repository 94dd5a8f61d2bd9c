import datetime
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


# Contenedor JSON de catálogos

class CatalogEntryModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1, description="Nombre único de la entrada")
    taxonomy: str = Field(..., description="Cadena de la taxonomía, p. ej. '4 | US | * | H+ | NR | v4 | ADRL6'")
    description: Optional[str] = Field(None, description="Descripción libre del sistema")
    source: Optional[str] = Field(None, description="Fuente de la clasificación")
    date: Optional[datetime.date] = Field(None, description="Fecha de la clasificación (YYYY-MM-DD)")
    note: Optional[str] = Field(None, description="Observaciones, p. ej. estimaciones")

    @field_validator("name")
    @classmethod
    def name_not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("el nombre no puede estar en blanco")
        return value


class CatalogFileModel(BaseModel):
    version: int = Field(..., description="Versión del formato (1)")
    entries: List[Any] = Field(default_factory=list, description="Entradas del catálogo")


# Peticiones y respuestas de la API HTTP

StarStyle = Literal["ascii", "unicode"]
Deny = Literal["error", "warning", "info"]


class DiagnosticModel(BaseModel):
    rule_id: str
    severity: str
    message: str
    span: Optional[Dict[str, int]] = None


class TaxonomyRequest(BaseModel):
    text: str = Field(..., description="Registro completo o cadena solo-ODD")
    star_style: StarStyle = Field("ascii", description="Estilo de la estrella en la salida")


class ParseResponse(BaseModel):
    ok: bool
    kind: Optional[Literal["record", "odd"]] = None
    canonical: Optional[str] = None
    value: Optional[dict] = None
    diagnostics: List[DiagnosticModel] = Field(default_factory=list)


class ValidateRequest(BaseModel):
    text: str
    rules: Optional[List[str]] = Field(None, description="Reglas habilitadas (todas por defecto)")
    deny: Deny = Field("error", description="Severidad mínima que se considera fallo")


class ValidateResponse(BaseModel):
    ok: bool
    diagnostics: List[DiagnosticModel] = Field(default_factory=list)


class ExplainLineModel(BaseModel):
    category: str
    code: str
    description: str


class ExplainResponse(BaseModel):
    canonical: str
    lines: List[ExplainLineModel]


class CompareRequest(BaseModel):
    a: str = Field(..., description="Primer registro")
    b: str = Field(..., description="Segundo registro")


class RuleModel(BaseModel):
    rule_id: str
    title: str
    severity: str
    rationale: str
    enabled_by_default: bool = True


class CatalogEntryResponse(BaseModel):
    name: str
    taxonomy: str
    description: Optional[str] = None
    source: Optional[str] = None
    date: Optional[str] = None
    note: Optional[str] = None


class QueryRequest(BaseModel):
    demand: str = Field(..., description="ODD demandado en forma solo-ODD")
    sae: Optional[int] = Field(None, ge=0, le=5)
    min_adrl: Optional[int] = Field(None, ge=1, le=9)
    relax_tags: bool = True


class GapRequest(BaseModel):
    axes: Dict[str, List[str]] = Field(..., description="Ejes de la rejilla, p. ej. {'country': ['DE', 'US']}")
    sae: List[int] = Field(default_factory=lambda: [4])
    min_adrl: Optional[int] = Field(None, ge=1, le=9)
    relax_tags: Optional[bool] = None
    defaults: Optional[str] = Field(None, description="Valores fijos en forma solo-ODD")
