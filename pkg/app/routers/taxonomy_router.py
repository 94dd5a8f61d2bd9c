from typing import Any, Dict, List

from fastapi import APIRouter, HTTPException

from app.exceptions import TaxonomyError
from app.models import (
    CompareRequest,
    DiagnosticModel,
    ExplainLineModel,
    ExplainResponse,
    ParseResponse,
    RuleModel,
    TaxonomyRequest,
    ValidateRequest,
    ValidateResponse,
)
from app.services.analysis_service import analysis_service
from app.services.catalog_service import CatalogEntry
from app.services.lint_service import lint_service
from app.services.parser_service import parser_service
from app.taxonomy.diagnostics import Diagnostic, Severity
from app.taxonomy.model import TaxonomyRecord

router = APIRouter(prefix="/api/taxonomy", tags=["taxonomy"])
lint_router = APIRouter(prefix="/api/lint", tags=["lint"])


def _diagnostics(diagnostics: List[Diagnostic]) -> List[DiagnosticModel]:
    return [DiagnosticModel(**d.to_dict()) for d in diagnostics]


@router.post("/parse", response_model=ParseResponse)
async def parse(request: TaxonomyRequest):
    """
    Interpreta un registro completo o una cadena solo-ODD.

    Los errores de parseo no son errores HTTP: se devuelven como diagnósticos
    con ok=false.
    """
    result = parser_service.parse_any(request.text)
    if result.value is None:
        return ParseResponse(ok=False, diagnostics=_diagnostics(result.diagnostics))
    value = parser_service.to_dict(result.value)
    if isinstance(result.value, TaxonomyRecord):
        canonical = parser_service.canonicalize(result.value, request.star_style)
    else:
        canonical = parser_service.canonicalize_odd(result.value, request.star_style)
    return ParseResponse(
        ok=True,
        kind=value["kind"],
        canonical=canonical,
        value=value,
        diagnostics=_diagnostics(result.diagnostics),
    )


@router.post("/validate", response_model=ValidateResponse)
async def validate(request: ValidateRequest):
    """Parsea un registro y aplica las reglas de lint habilitadas"""
    try:
        lint_service.resolve_rules(request.rules)
        result = parser_service.parse_record(request.text)
        diagnostics = list(result.diagnostics)
        if result.value is not None:
            diagnostics.extend(lint_service.run_lints(result.value, request.rules))
    except TaxonomyError as e:
        raise HTTPException(status_code=e.code, detail=e.message)
    deny = Severity(request.deny)
    return ValidateResponse(
        ok=not any(d.severity.at_least(deny) for d in diagnostics),
        diagnostics=_diagnostics(diagnostics),
    )


@router.post("/explain", response_model=ExplainResponse)
async def explain(request: TaxonomyRequest):
    result = parser_service.parse_any(request.text)
    if result.value is None:
        raise HTTPException(status_code=422, detail=[d.render() for d in result.diagnostics])
    if isinstance(result.value, TaxonomyRecord):
        canonical = parser_service.canonicalize(result.value, request.star_style)
        lines = parser_service.explain(result.value)
    else:
        canonical = parser_service.canonicalize_odd(result.value, request.star_style)
        lines = parser_service.explain_odd(result.value)
    return ExplainResponse(canonical=canonical, lines=[ExplainLineModel(**line._asdict()) for line in lines])


@router.post("/compare", response_model=Dict[str, Any])
async def compare(request: CompareRequest):
    """Compara dos registros por dimensión; los deltas son b menos a"""
    entries = []
    for text in (request.a, request.b):
        result = parser_service.parse_record(text)
        if result.value is None:
            raise HTTPException(status_code=422, detail=[d.render() for d in result.diagnostics])
        entries.append(CatalogEntry(parser_service.canonicalize(result.value), result.value))
    report = analysis_service.compare_entries(*entries)
    return analysis_service.comparison_dict(report)


@lint_router.get("/rules", response_model=List[RuleModel])
async def list_rules():
    return [RuleModel(**info.to_dict()) for info in lint_service.list_rules()]
