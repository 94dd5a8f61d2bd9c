from typing import List

import structlog
from fastapi import APIRouter, HTTPException

from app.config import settings
from app.exceptions import TaxonomyError
from app.models import CatalogEntryResponse, QueryRequest
from app.services.catalog_service import BUNDLED_CATALOG, Catalog, CatalogEntry, catalog_service
from app.services.parser_service import parser_service
from app.taxonomy.model import AdrlLevel, SaeLevel

router = APIRouter(prefix="/api/catalog", tags=["catalog"])
logger = structlog.get_logger(__name__)


def load_default_catalog() -> Catalog:
    """Catálogo configurado en CATALOG_PATH, o el de ejemplos incluido"""
    catalog, diagnostics = catalog_service.read_catalog(settings.CATALOG_PATH or BUNDLED_CATALOG)
    if diagnostics:
        logger.warning("catalog.diagnostics", count=len(diagnostics), first=diagnostics[0].render())
    return catalog


def _entry_response(entry: CatalogEntry) -> CatalogEntryResponse:
    return CatalogEntryResponse(
        name=entry.name,
        taxonomy=parser_service.canonicalize(entry.record, settings.STAR_STYLE),
        description=entry.description,
        source=entry.source,
        date=entry.date.isoformat() if entry.date else None,
        note=entry.note,
    )


@router.get("/entries", response_model=List[CatalogEntryResponse])
async def list_entries():
    """Lista las entradas del catálogo por defecto"""
    try:
        catalog = load_default_catalog()
    except TaxonomyError as e:
        raise HTTPException(status_code=e.code, detail=e.message)
    return [_entry_response(entry) for entry in catalog.entries]


@router.post("/query", response_model=List[CatalogEntryResponse])
async def query(request: QueryRequest):
    """
    Entradas cuyo ODD abarca la demanda.

    Args:
        request: ODD demandado (solo-ODD) y filtros opcionales de SAE y ADRL mínimo
    """
    result = parser_service.parse_odd(request.demand)
    if result.value is None:
        raise HTTPException(status_code=422, detail=[d.render() for d in result.diagnostics])
    try:
        catalog = load_default_catalog()
    except TaxonomyError as e:
        raise HTTPException(status_code=e.code, detail=e.message)
    entries = catalog_service.query_catalog(
        catalog,
        result.value,
        sae=None if request.sae is None else SaeLevel(request.sae),
        min_adrl=None if request.min_adrl is None else AdrlLevel(request.min_adrl),
        relax_tags=request.relax_tags,
    )
    return [_entry_response(entry) for entry in entries]
