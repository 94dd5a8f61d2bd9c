import csv
import hashlib
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import structlog

from app.config import settings
from app.exceptions import EmptyGridError, InvalidGridError, InvalidValueError
from app.services.catalog_service import Catalog, CatalogEntry, catalog_service, odd_covers
from app.services.parser_service import parser_service
from app.taxonomy.lattice import combine, odd_compare_dimensions
from app.taxonomy.model import (
    STAR,
    AdrlLevel,
    CountryScope,
    EnvScope,
    Light,
    OddDescriptor,
    Relation,
    RoadTypeSet,
    RoadUserScope,
    SaeLevel,
    VelocityClass,
    Wetness,
)

logger = structlog.get_logger(__name__)

# Nombre de eje -> atributo de OddDescriptor
GRID_DIMENSIONS = {
    "country": "countries",
    "users": "road_users",
    "roads": "road_types",
    "env": "environment",
    "velocity": "velocity",
    "tags": "additional_requirements",
}
WHITE_SPOT = "WHITE SPOT"

# Ejes sin valor mínimo: si no se enumeran, no restringen la cobertura
UNBOUNDED_DIMENSIONS = {"country": "countries", "roads": "roads"}


def weakest_demand() -> OddDescriptor:
    """
    Valores fijos por defecto de la rejilla.

    Usuarios, entorno, velocidad y requisitos toman su valor mínimo. Países y
    tipos de vía no tienen mínimo: quedan en ★ y GridSpec los marca como no
    restringidos cuando no tienen eje.
    """
    return OddDescriptor(
        countries=CountryScope.any(),
        road_users=RoadUserScope.AUTOMATED_ONLY,
        road_types=RoadTypeSet.any(),
        environment=EnvScope(Light.DAYLIGHT_ONLY, Wetness.DRY_ONLY, False),
        velocity=VelocityClass.V0,
        additional_requirements=(),
    )


@dataclass(frozen=True)
class DemandCell:
    sae: SaeLevel
    odd: OddDescriptor
    min_adrl: AdrlLevel
    # Categorías (nombres del retículo) que no se comparan al buscar cobertura
    unconstrained: Tuple[str, ...] = ()


@dataclass(frozen=True)
class GridSpec:
    axes: Tuple[Tuple[str, Tuple[Any, ...]], ...]
    defaults: Optional[OddDescriptor] = None
    min_adrl: AdrlLevel = AdrlLevel.ADRL_9
    sae_levels: Tuple[SaeLevel, ...] = (SaeLevel.LEVEL_4,)
    unconstrained: Tuple[str, ...] = field(init=False, default=())

    def __post_init__(self):
        axes = tuple((name, tuple(values)) for name, values in self.axes)
        names = [name for name, _ in axes]
        unknown = [name for name in names if name not in GRID_DIMENSIONS]
        if unknown:
            raise InvalidGridError(f"Dimensión desconocida: {', '.join(unknown)}", {"dimensions": unknown})
        repeated = sorted({name for name in names if names.count(name) > 1})
        if repeated:
            raise InvalidGridError(f"Dimensión repetida: {', '.join(repeated)}", {"dimensions": repeated})
        for name, values in axes:
            if len(set(values)) != len(values):
                raise InvalidGridError(f"Valores repetidos en el eje '{name}'", {"dimension": name})
        sae_levels = tuple(SaeLevel.parse(level) for level in self.sae_levels)
        if len(set(sae_levels)) != len(sae_levels):
            raise InvalidGridError("Niveles SAE repetidos")
        object.__setattr__(self, "axes", axes)
        if self.defaults is None:
            object.__setattr__(self, "defaults", weakest_demand())
            object.__setattr__(self, "unconstrained", tuple(
                dimension for name, dimension in UNBOUNDED_DIMENSIONS.items() if name not in names
            ))
        object.__setattr__(self, "sae_levels", tuple(sorted(sae_levels)))
        object.__setattr__(self, "min_adrl", AdrlLevel.parse(self.min_adrl))

    @property
    def cell_count(self) -> int:
        count = len(self.sae_levels)
        for _, values in self.axes:
            count *= len(values)
        return count


@dataclass(frozen=True)
class GapCell:
    demand: DemandCell
    labels: Tuple[Tuple[str, str], ...]
    covering: Tuple[str, ...]

    @property
    def white_spot(self) -> bool:
        return not self.covering


@dataclass(frozen=True)
class GapReport:
    cells: Tuple[GapCell, ...]
    generated_from: str
    relax_tags: bool
    axis_names: Tuple[str, ...] = ()

    @property
    def mode(self) -> str:
        return "relax-tags" if self.relax_tags else "strict-tags"


@dataclass(frozen=True)
class ComparisonReport:
    a_name: str
    b_name: str
    per_dimension: Tuple[Tuple[str, Relation], ...]
    overall: Relation
    sae_delta: int
    adrl_delta: Optional[int]


def dimension_label(name: str, value) -> str:
    """Texto canónico de un valor de eje"""
    if name == "country":
        return STAR if value.is_any else " ".join(value.sorted_codes())
    if name == "users":
        return value.code
    if name == "roads":
        return STAR if value.is_any else "".join(value.tokens())
    if name == "env":
        return STAR if value.is_top else value.code()
    if name == "velocity":
        return value.code
    return ", ".join(sorted(value)) if value else "none"


class AnalysisService:
    """Comparación de sistemas y análisis de huecos (white spots) sobre catálogos"""

    def parse_axis(self, axis: str) -> Tuple[str, Tuple[Any, ...]]:
        """Interpreta 'country=DE,US' o 'roads=H+,U' en (dimensión, valores)"""
        name, sep, raw_values = axis.partition("=")
        name = name.strip().lower()
        if not sep or name not in GRID_DIMENSIONS:
            raise InvalidGridError(f"Eje inválido '{axis}' (se espera DIMENSIÓN=V1,V2,...)", {"axis": axis})
        values = []
        for raw in raw_values.split(","):
            if not raw.strip():
                continue
            try:
                value = parser_service.parse_dimension("extras" if name == "tags" else name, raw)
            except InvalidValueError as e:
                raise InvalidGridError(f"Valor inválido en el eje '{name}': {e.message}", {"axis": axis})
            values.append(value)
        return name, tuple(dict.fromkeys(values))

    def covers(self, entry: CatalogEntry, cell: DemandCell, relax_tags: bool = True) -> bool:
        record = entry.record
        return (
            record.sae == cell.sae
            and record.adrl is not None
            and record.adrl >= cell.min_adrl
            and odd_covers(record.odd, cell.odd, relax_tags, cell.unconstrained)
        )

    def cells(self, grid: GridSpec) -> List[Tuple[DemandCell, Tuple[Tuple[str, str], ...]]]:
        """Producto cartesiano en orden lexicográfico de los ejes declarados y luego SAE"""
        if grid.cell_count == 0:
            raise EmptyGridError()
        names = [name for name, _ in grid.axes]
        cells = []
        for combo in product(*(values for _, values in grid.axes), grid.sae_levels):
            *axis_values, sae = combo
            changes = {GRID_DIMENSIONS[name]: value for name, value in zip(names, axis_values)}
            odd = grid.defaults.replace(**changes)
            labels = tuple((name, dimension_label(name, value)) for name, value in zip(names, axis_values))
            cells.append((DemandCell(sae, odd, grid.min_adrl, grid.unconstrained), labels))
        return cells

    def gap_analysis(
        self,
        catalog: Catalog,
        grid: GridSpec,
        relax_tags: bool = True,
        catalog_label: str = "catalog",
        workers: Optional[int] = None,
    ) -> GapReport:
        cells = self.cells(grid)

        def evaluate(item):
            demand, labels = item
            covering = tuple(e.name for e in catalog.entries if self.covers(e, demand, relax_tags))
            return GapCell(demand, labels, covering)

        workers = workers or settings.GAP_WORKERS
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = tuple(pool.map(evaluate, cells))
        else:
            results = tuple(map(evaluate, cells))

        report = GapReport(
            cells=results,
            generated_from=self.catalog_identity(catalog, catalog_label),
            relax_tags=relax_tags,
            axis_names=tuple(name for name, _ in grid.axes),
        )
        logger.info(
            "gaps.analyzed",
            cells=len(results),
            white_spots=len(self.white_spots(report)),
            mode=report.mode,
        )
        return report

    @staticmethod
    def white_spots(report: GapReport) -> List[GapCell]:
        return [cell for cell in report.cells if cell.white_spot]

    @staticmethod
    def catalog_identity(catalog: Catalog, label: str) -> str:
        digest = hashlib.sha256(catalog_service.save_catalog(catalog, "json")).hexdigest()[:12]
        return f"{label} ({len(catalog)} entries, sha256:{digest})"

    def compare_entries(self, a: CatalogEntry, b: CatalogEntry) -> ComparisonReport:
        per_dimension = tuple(odd_compare_dimensions(a.record.odd, b.record.odd))
        adrl_delta = None
        if a.record.adrl is not None and b.record.adrl is not None:
            adrl_delta = int(b.record.adrl) - int(a.record.adrl)
        return ComparisonReport(
            a_name=a.name,
            b_name=b.name,
            per_dimension=per_dimension,
            overall=combine(relation for _, relation in per_dimension),
            sae_delta=int(b.record.sae) - int(a.record.sae),
            adrl_delta=adrl_delta,
        )

    # Renderizado

    def render_report(self, report: Union[GapReport, ComparisonReport], format: str = "markdown") -> str:
        renderers = {
            (GapReport, "markdown"): self._gap_markdown,
            (GapReport, "csv"): self._gap_csv,
            (GapReport, "json"): self._gap_json,
            (ComparisonReport, "markdown"): self._comparison_markdown,
            (ComparisonReport, "csv"): self._comparison_csv,
            (ComparisonReport, "json"): self._comparison_json,
        }
        renderer = renderers.get((type(report), format))
        if renderer is None:
            raise InvalidValueError(f"Formato de informe desconocido '{format}'")
        return renderer(report)

    @staticmethod
    def _md_cell(text: str) -> str:
        return text.replace("|", "\\|")

    def _gap_markdown(self, report: GapReport) -> str:
        lines = [
            "# White-spot analysis",
            "",
            f"- Catalog: {report.generated_from}",
            f"- Mode: {report.mode}",
            f"- Cells: {len(report.cells)}, white spots: {len(self.white_spots(report))}",
        ]
        header = list(report.axis_names) + ["demand", "min ADRL", "covered by"]
        for sae in sorted({cell.demand.sae for cell in report.cells}):
            lines += ["", f"## SAE level {int(sae)}", ""]
            lines.append("| " + " | ".join(header) + " |")
            lines.append("|" + "|".join(" --- " for _ in header) + "|")
            for cell in report.cells:
                if cell.demand.sae != sae:
                    continue
                row = [label for _, label in cell.labels]
                row.append(parser_service.canonicalize_odd(cell.demand.odd))
                row.append(cell.demand.min_adrl.token)
                row.append(", ".join(cell.covering) if cell.covering else WHITE_SPOT)
                lines.append("| " + " | ".join(self._md_cell(v) for v in row) + " |")
        return "\n".join(lines) + "\n"

    @staticmethod
    def _csv(rows: Sequence[Sequence[Any]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\r\n")
        writer.writerows(rows)
        return buffer.getvalue()

    def _gap_csv(self, report: GapReport) -> str:
        rows = [["sae", *report.axis_names, "demand", "min_adrl", "covered", "covering"]]
        for cell in report.cells:
            rows.append([
                int(cell.demand.sae),
                *(label for _, label in cell.labels),
                parser_service.canonicalize_odd(cell.demand.odd),
                int(cell.demand.min_adrl),
                "false" if cell.white_spot else "true",
                ";".join(cell.covering),
            ])
        return self._csv(rows)

    def gap_report_dict(self, report: GapReport) -> Dict[str, Any]:
        return {
            "generated_from": report.generated_from,
            "mode": report.mode,
            "cells": [
                {
                    "demand": {
                        "sae": int(cell.demand.sae),
                        "axes": dict(cell.labels),
                        "odd": parser_service.canonicalize_odd(cell.demand.odd),
                        "min_adrl": int(cell.demand.min_adrl),
                        "unconstrained": [
                            name for name, dimension in UNBOUNDED_DIMENSIONS.items()
                            if dimension in cell.demand.unconstrained
                        ],
                    },
                    "covering": list(cell.covering),
                    "white_spot": cell.white_spot,
                }
                for cell in report.cells
            ],
        }

    def _gap_json(self, report: GapReport) -> str:
        return json.dumps(self.gap_report_dict(report), indent=2, ensure_ascii=False) + "\n"

    def _comparison_markdown(self, report: ComparisonReport) -> str:
        lines = [
            f"# {self._md_cell(report.a_name)} vs {self._md_cell(report.b_name)}",
            "",
            "| dimension | relation |",
            "| --- | --- |",
        ]
        lines += [f"| {name} | {relation.value} |" for name, relation in report.per_dimension]
        lines += [
            f"| overall | {report.overall.value} |",
            "",
            f"- SAE delta: {report.sae_delta:+d}",
            f"- ADRL delta: {'n/a' if report.adrl_delta is None else format(report.adrl_delta, '+d')}",
        ]
        return "\n".join(lines) + "\n"

    def _comparison_csv(self, report: ComparisonReport) -> str:
        rows = [["dimension", "relation"]]
        rows += [[name, relation.value] for name, relation in report.per_dimension]
        rows.append(["overall", report.overall.value])
        rows.append(["sae_delta", report.sae_delta])
        rows.append(["adrl_delta", "" if report.adrl_delta is None else report.adrl_delta])
        return self._csv(rows)

    def comparison_dict(self, report: ComparisonReport) -> Dict[str, Any]:
        return {
            "a": report.a_name,
            "b": report.b_name,
            "per_dimension": {name: relation.value for name, relation in report.per_dimension},
            "overall": report.overall.value,
            "sae_delta": report.sae_delta,
            "adrl_delta": report.adrl_delta,
        }

    def _comparison_json(self, report: ComparisonReport) -> str:
        return json.dumps(self.comparison_dict(report), indent=2, ensure_ascii=False) + "\n"


# Instancia global del servicio de análisis
analysis_service = AnalysisService()
