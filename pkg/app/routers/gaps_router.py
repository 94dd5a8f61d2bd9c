from typing import Any, Dict

from fastapi import APIRouter, HTTPException

from app.config import settings
from app.exceptions import TaxonomyError
from app.models import GapRequest
from app.routers.catalog_router import load_default_catalog
from app.services.analysis_service import GridSpec, analysis_service
from app.services.catalog_service import BUNDLED_CATALOG
from app.services.parser_service import parser_service
from app.taxonomy.model import AdrlLevel

router = APIRouter(prefix="/api/gaps", tags=["gaps"])


@router.post("", response_model=Dict[str, Any])
async def gap_analysis(request: GapRequest):
    """
    Análisis de huecos sobre el catálogo por defecto.

    Cada celda indica las entradas que la cubren; white_spot=true si ninguna.
    """
    defaults = None
    if request.defaults:
        result = parser_service.parse_odd(request.defaults)
        if result.value is None:
            raise HTTPException(status_code=422, detail=[d.render() for d in result.diagnostics])
        defaults = result.value
    try:
        grid = GridSpec(
            axes=tuple(
                analysis_service.parse_axis(f"{name}={','.join(values)}")
                for name, values in request.axes.items()
            ),
            defaults=defaults,
            min_adrl=AdrlLevel.parse(request.min_adrl or settings.DEFAULT_MIN_ADRL),
            sae_levels=tuple(request.sae),
        )
        report = analysis_service.gap_analysis(
            load_default_catalog(),
            grid,
            relax_tags=settings.RELAX_TAGS if request.relax_tags is None else request.relax_tags,
            catalog_label=settings.CATALOG_PATH or BUNDLED_CATALOG,
        )
    except TaxonomyError as e:
        raise HTTPException(status_code=e.code, detail=e.message)
    payload = analysis_service.gap_report_dict(report)
    payload["white_spots"] = len(analysis_service.white_spots(report))
    return payload
