import datetime
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

import structlog
from pydantic import ValidationError as PydanticValidationError

from app.exceptions import (
    CatalogIOError,
    DuplicateEntryError,
    EntryNotFoundError,
    InvalidValueError,
    MalformedContainerError,
    UnsupportedVersionError,
)
from app.models import CatalogEntryModel, CatalogFileModel
from app.services.parser_service import parser_service
from app.taxonomy.diagnostics import (
    DUPLICATE_ENTRY,
    MALFORMED_ENTRY,
    SKIPPED_ENTRY,
    Diagnostic,
    Severity,
)
from app.taxonomy.lattice import CATEGORY_DIMENSIONS, combine, odd_compare_dimensions
from app.taxonomy.model import AdrlLevel, OddDescriptor, SaeLevel, TaxonomyRecord

logger = structlog.get_logger(__name__)

CATALOG_VERSION = 1
BUNDLED_CATALOG = "paper-examples"
FORMATS = ("json", "text")


@dataclass(frozen=True)
class CatalogEntry:
    """Sistema clasificado, con nombre y fuente, dentro de un catálogo"""
    name: str
    record: TaxonomyRecord
    description: Optional[str] = None
    source: Optional[str] = None
    date: Optional[datetime.date] = None
    note: Optional[str] = None

    def __post_init__(self):
        if not self.name or not self.name.strip():
            raise InvalidValueError("El nombre de la entrada no puede estar vacío")

    @property
    def key(self) -> str:
        return self.name.casefold()


@dataclass(frozen=True)
class Catalog:
    version: int = CATALOG_VERSION
    entries: Tuple[CatalogEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.version != CATALOG_VERSION:
            raise UnsupportedVersionError(self.version)
        object.__setattr__(self, "entries", tuple(self.entries))
        keys = [entry.key for entry in self.entries]
        if len(set(keys)) != len(keys):
            raise InvalidValueError("Los nombres de las entradas deben ser únicos")

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, name: str) -> Optional[CatalogEntry]:
        key = name.casefold()
        return next((entry for entry in self.entries if entry.key == key), None)

    def names(self) -> List[str]:
        return [entry.name for entry in self.entries]


def odd_covers(
    offer: OddDescriptor,
    demand: OddDescriptor,
    relax_tags: bool = True,
    ignore: Iterable[str] = (),
) -> bool:
    """
    True si el ODD ofrecido abarca el demandado.

    Los requisitos del ofertante son restricciones propias: sin relax_tags, el
    ofertante solo cubre si la demanda acepta todos sus requisitos. Las
    categorías de ignore (nombres de CATEGORY_DIMENSIONS) no se comparan.
    """
    ignored = frozenset(ignore)
    relations = (
        relation
        for name, relation in odd_compare_dimensions(offer, demand)
        if name in CATEGORY_DIMENSIONS and name not in ignored
    )
    if not combine(relations).covers:
        return False
    return relax_tags or offer.tags <= demand.tags


class CatalogService:
    """Servicio para cargar, guardar y consultar catálogos de sistemas"""

    def load_catalog(self, data: bytes, format: str = "json") -> Tuple[Catalog, List[Diagnostic]]:
        """
        Carga un catálogo desde bytes UTF-8.

        Las entradas con errores de parseo se omiten y se reportan; de los
        nombres duplicados se conserva la primera aparición.
        """
        if format not in FORMATS:
            raise MalformedContainerError(f"formato desconocido '{format}'")
        try:
            text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
        except UnicodeDecodeError as e:
            raise MalformedContainerError(f"no es UTF-8 válido: {e}")

        if format == "json":
            raw_entries = self._json_entries(text)
        else:
            raw_entries = self._text_entries(text)

        diagnostics: List[Diagnostic] = []
        entries: List[CatalogEntry] = []
        seen = set()
        for position, raw in raw_entries:
            entry = self._build_entry(position, raw, diagnostics)
            if entry is None:
                continue
            if entry.key in seen:
                diagnostics.append(Diagnostic(
                    DUPLICATE_ENTRY,
                    Severity.WARNING,
                    f"Entrada #{position}: nombre duplicado '{entry.name}', se conserva la primera aparición",
                ))
                continue
            seen.add(entry.key)
            entries.append(entry)

        catalog = Catalog(CATALOG_VERSION, tuple(entries))
        logger.info(
            "catalog.loaded",
            format=format,
            entries=len(entries),
            skipped=len(raw_entries) - len(entries),
            diagnostics=len(diagnostics),
        )
        return catalog, diagnostics

    def _json_entries(self, text: str) -> List[Tuple[int, dict]]:
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise MalformedContainerError(f"JSON inválido: {e}")
        if not isinstance(payload, dict):
            raise MalformedContainerError("el nivel superior debe ser un objeto")
        if "version" in payload and payload["version"] != CATALOG_VERSION:
            raise UnsupportedVersionError(payload["version"])
        try:
            container = CatalogFileModel.model_validate(payload)
        except PydanticValidationError as e:
            raise MalformedContainerError(str(e))
        return list(enumerate(container.entries, start=1))

    def _text_entries(self, text: str) -> List[Tuple[int, dict]]:
        raw_entries = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            # Los registros nunca contienen "::", así que el nombre puede contenerlo
            name, sep, taxonomy = stripped.rpartition("::")
            raw_entries.append((lineno, {"name": name.strip(), "taxonomy": taxonomy.strip()} if sep else {"line": stripped}))
        return raw_entries

    def _build_entry(self, position: int, raw, diagnostics: List[Diagnostic]) -> Optional[CatalogEntry]:
        try:
            model = CatalogEntryModel.model_validate(raw)
        except PydanticValidationError as e:
            fields = ", ".join(".".join(str(p) for p in err["loc"]) or "entrada" for err in e.errors())
            diagnostics.append(Diagnostic(
                MALFORMED_ENTRY,
                Severity.ERROR,
                f"Entrada #{position} mal formada ({fields}), se omite",
            ))
            return None

        result = parser_service.parse_record(model.taxonomy)
        for diagnostic in result.diagnostics:
            diagnostics.append(replace(diagnostic, message=f"[{model.name}] {diagnostic.message}"))
        if result.value is None:
            diagnostics.append(Diagnostic(
                SKIPPED_ENTRY,
                Severity.ERROR,
                f"Entrada '{model.name}' omitida por errores de parseo",
            ))
            return None
        return CatalogEntry(
            name=model.name,
            record=result.value,
            description=model.description,
            source=model.source,
            date=model.date,
            note=model.note,
        )

    def save_catalog(self, catalog: Catalog, format: str = "json", star_style: str = "ascii") -> bytes:
        """Serializa el catálogo con los registros en forma canónica"""
        if format == "json":
            entries = []
            for entry in catalog.entries:
                item = {"name": entry.name, "taxonomy": parser_service.canonicalize(entry.record, star_style)}
                for key in ("description", "source", "note"):
                    value = getattr(entry, key)
                    if value is not None:
                        item[key] = value
                if entry.date is not None:
                    item["date"] = entry.date.isoformat()
                entries.append(item)
            payload = {"version": catalog.version, "entries": entries}
            return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
        if format == "text":
            for entry in catalog.entries:
                self._check_text_name(entry.name)
            lines = [
                f"{entry.name} :: {parser_service.canonicalize(entry.record, star_style)}"
                for entry in catalog.entries
            ]
            return "".join(line + "\n" for line in lines).encode("utf-8")
        raise MalformedContainerError(f"formato desconocido '{format}'")

    @staticmethod
    def _check_text_name(name: str) -> None:
        """El formato texto no puede representar nombres que empiecen por '#' o con saltos de línea"""
        if name.startswith("#") or name != name.strip() or len(name.splitlines()) != 1:
            raise MalformedContainerError(f"el nombre '{name}' no se puede guardar en formato texto")

    def query_catalog(
        self,
        catalog: Catalog,
        demand: OddDescriptor,
        sae: Optional[SaeLevel] = None,
        min_adrl: Optional[AdrlLevel] = None,
        relax_tags: bool = True,
    ) -> List[CatalogEntry]:
        """Entradas cuyo ODD abarca la demanda, filtradas por SAE exacto y ADRL mínimo"""
        results = []
        for entry in catalog.entries:
            record = entry.record
            if sae is not None and record.sae != sae:
                continue
            if min_adrl is not None and (record.adrl is None or record.adrl < min_adrl):
                continue
            if odd_covers(record.odd, demand, relax_tags):
                results.append(entry)
        return results

    def add_entry(self, catalog: Catalog, entry: CatalogEntry) -> Catalog:
        if catalog.get(entry.name) is not None:
            raise DuplicateEntryError(entry.name)
        return Catalog(catalog.version, catalog.entries + (entry,))

    def remove_entry(self, catalog: Catalog, name: str) -> Catalog:
        if catalog.get(name) is None:
            raise EntryNotFoundError(name)
        key = name.casefold()
        return Catalog(catalog.version, tuple(e for e in catalog.entries if e.key != key))

    # Ficheros

    @staticmethod
    def detect_format(data: bytes) -> str:
        """'json' si el primer byte no blanco es '{', si no 'text'"""
        stripped = data.lstrip()
        if stripped.startswith(b"\xef\xbb\xbf"):
            stripped = stripped[3:].lstrip()
        return "json" if stripped.startswith(b"{") else "text"

    def read_bytes(self, path: str) -> bytes:
        if path == BUNDLED_CATALOG and not Path(path).exists():
            return resources.files("app.data").joinpath(f"{BUNDLED_CATALOG}.json").read_bytes()
        try:
            return Path(path).read_bytes()
        except FileNotFoundError:
            raise CatalogIOError(path, "el fichero no existe", code=404)
        except OSError as e:
            raise CatalogIOError(path, e.strerror or str(e))

    def read_catalog(self, path: str, format: Optional[str] = None) -> Tuple[Catalog, List[Diagnostic]]:
        data = self.read_bytes(path)
        logger.debug("catalog.read", path=path, size=len(data))
        return self.load_catalog(data, format or self.detect_format(data))

    def write_catalog(self, catalog: Catalog, path: str, format: str = "json", star_style: str = "ascii") -> None:
        try:
            Path(path).write_bytes(self.save_catalog(catalog, format, star_style))
        except OSError as e:
            raise CatalogIOError(path, e.strerror or str(e))
        logger.info("catalog.written", path=path, entries=len(catalog))


# Instancia global del servicio de catálogos
catalog_service = CatalogService()
