import json

import pytest

from app.exceptions import (
    CatalogIOError,
    DuplicateEntryError,
    EntryNotFoundError,
    InvalidValueError,
    MalformedContainerError,
    UnsupportedVersionError,
)
from app.services.catalog_service import Catalog, CatalogEntry, catalog_service, odd_covers
from app.taxonomy.lattice import NoOverlap, odd_compare, odd_meet
from app.taxonomy.model import AdrlLevel, Relation, SaeLevel, odd_top
from tests.generators import random_odd, random_record


def catalog_json(*entries, version=1) -> bytes:
    return json.dumps({"version": version, "entries": list(entries)}).encode("utf-8")


def test_bundled_catalog_holds_literature_examples(bundled_catalog):
    assert bundled_catalog.names() == [
        "Truck highway pilot",
        "Valet Parking",
        "Highway Pilot",
        "Robotaxis",
        "Mining trucks",
    ]
    valet = bundled_catalog.get("valet parking")
    assert valet.record.adrl is AdrlLevel.ADRL_8
    assert "8 or 9" in valet.note


def test_load_reports_and_skips_bad_entries():
    data = catalog_json(
        {"name": "ok", "taxonomy": "4 | US | ★ | H+ | NR | v4 | ADRL6"},
        {"name": "broken", "taxonomy": "9 | US | ★ | H+ | NR | v4"},
        {"name": "OK", "taxonomy": "4 | DE | ★ | H+ | NR | v4"},
        {"taxonomy": "4 | DE | ★ | H+ | NR | v4"},
    )
    catalog, diagnostics = catalog_service.load_catalog(data)
    assert catalog.names() == ["ok"]
    assert sorted(d.rule_id for d in diagnostics) == ["C001", "C002", "C003", "P002"]
    parse_error = next(d for d in diagnostics if d.rule_id == "P002")
    assert parse_error.message.startswith("[broken]")
    assert parse_error.span.start == 0


def test_unknown_fields_are_malformed_entries():
    data = catalog_json({"name": "x", "taxonomy": "4 | US | ★ | H+ | NR | v4", "colour": "red"})
    catalog, diagnostics = catalog_service.load_catalog(data)
    assert len(catalog) == 0
    assert [d.rule_id for d in diagnostics] == ["C003"]


def test_container_errors():
    with pytest.raises(MalformedContainerError):
        catalog_service.load_catalog(b"{not json")
    with pytest.raises(MalformedContainerError):
        catalog_service.load_catalog(b"[]")
    with pytest.raises(MalformedContainerError):
        catalog_service.load_catalog(b"\xff\xfe")
    with pytest.raises(UnsupportedVersionError):
        catalog_service.load_catalog(catalog_json(version=2))


def test_save_is_canonical_and_stable(bundled_catalog):
    saved = catalog_service.save_catalog(bundled_catalog)
    reloaded, diagnostics = catalog_service.load_catalog(saved)
    assert diagnostics == []
    assert catalog_service.save_catalog(reloaded) == saved
    assert [e.record for e in reloaded.entries] == [e.record for e in bundled_catalog.entries]
    payload = json.loads(saved)
    assert payload["entries"][0]["taxonomy"] == "4 | US | * | H+ | NR | v4 | none | ADRL6"


def test_text_format_round_trip(bundled_catalog):
    text = catalog_service.save_catalog(bundled_catalog, "text", "unicode")
    assert text.decode("utf-8").splitlines()[0] == "Truck highway pilot :: 4 | US | ★ | H+ | NR | v4 | none | ADRL6"
    reloaded, diagnostics = catalog_service.load_catalog(b"# comentario\n\n" + text, "text")
    assert diagnostics == []
    assert reloaded.names() == bundled_catalog.names()


def test_detect_format():
    assert catalog_service.detect_format(b'  \n{"version": 1}') == "json"
    assert catalog_service.detect_format(b"a :: 4 | * | * | * | * | *") == "text"


def test_query_robotaxis_for_us_urban(bundled_catalog, odd):
    demand = odd("US | ★ | U | LD | v0")
    results = catalog_service.query_catalog(bundled_catalog, demand, SaeLevel.LEVEL_4, AdrlLevel.ADRL_9)
    assert [e.name for e in results] == ["Robotaxis"]


def test_query_without_filters(bundled_catalog, odd):
    results = catalog_service.query_catalog(bundled_catalog, odd("★ | ★ | S | LD | v0"))
    assert [e.name for e in results] == ["Valet Parking", "Mining trucks"]
    assert catalog_service.query_catalog(bundled_catalog, odd_top()) == []


def test_strict_tags(bundled_catalog, odd):
    demand = odd("US | ★ | U | LD | v0")
    assert catalog_service.query_catalog(bundled_catalog, demand, relax_tags=False) == []
    demand = odd("US | ★ | U | LD | v0 | onlysf")
    assert [e.name for e in catalog_service.query_catalog(bundled_catalog, demand, relax_tags=False)] == ["Robotaxis"]


def test_odd_covers_is_reflexive(odd):
    value = odd("DE US | ★ | H | LD | v3 | vehicleahead")
    assert odd_covers(value, value, relax_tags=False)


def test_add_and_remove_are_copy_on_write(bundled_catalog, record):
    entry = CatalogEntry("Shuttle", record("4 | DE | ★ | U | LD | v2 | ADRL7"))
    bigger = catalog_service.add_entry(bundled_catalog, entry)
    assert len(bigger) == 6 and len(bundled_catalog) == 5
    with pytest.raises(DuplicateEntryError):
        catalog_service.add_entry(bigger, CatalogEntry("shuttle", entry.record))
    smaller = catalog_service.remove_entry(bigger, "SHUTTLE")
    assert smaller.names() == bundled_catalog.names()
    with pytest.raises(EntryNotFoundError):
        catalog_service.remove_entry(smaller, "Shuttle")


def test_catalog_invariants(record):
    value = record("4 | DE | ★ | U | LD | v2")
    with pytest.raises(InvalidValueError):
        Catalog(entries=(CatalogEntry("a", value), CatalogEntry("A", value)))
    with pytest.raises(InvalidValueError):
        CatalogEntry("  ", value)


def test_file_round_trip(tmp_path, bundled_catalog):
    path = tmp_path / "catalog.txt"
    catalog_service.write_catalog(bundled_catalog, str(path), "text")
    reloaded, diagnostics = catalog_service.read_catalog(str(path))
    assert diagnostics == []
    assert reloaded.names() == bundled_catalog.names()


def test_missing_file(tmp_path):
    with pytest.raises(CatalogIOError) as exc:
        catalog_service.read_catalog(str(tmp_path / "nope.json"))
    assert exc.value.code == 404


def test_text_format_keeps_names_with_separator(record):
    value = record("4 | DE | ★ | U | LD | v2 | ADRL7")
    catalog = Catalog(entries=(CatalogEntry("A :: B", value), CatalogEntry("shuttle #1", value)))
    reloaded, diagnostics = catalog_service.load_catalog(catalog_service.save_catalog(catalog, "text"), "text")
    assert diagnostics == []
    assert reloaded.names() == ["A :: B", "shuttle #1"]
    assert [e.record for e in reloaded.entries] == [value, value]


@pytest.mark.parametrize("name", ["#1 shuttle", " padded", "two\nlines"])
def test_text_format_rejects_unrepresentable_names(record, name):
    catalog = Catalog(entries=(CatalogEntry(name, record("4 | DE | ★ | U | LD | v2")),))
    with pytest.raises(MalformedContainerError):
        catalog_service.save_catalog(catalog, "text")
    reloaded, _ = catalog_service.load_catalog(catalog_service.save_catalog(catalog), "json")
    assert reloaded.names() == [name]


@pytest.mark.parametrize("relax_tags", [True, False])
def test_query_is_monotonic(rng, relax_tags):
    entries = tuple(CatalogEntry(f"system-{i}", random_record(rng)) for i in range(40))
    catalog = Catalog(entries=entries)
    for _ in range(300):
        demand = random_odd(rng)
        sae = rng.choice([None, *SaeLevel])
        names = {e.name for e in catalog_service.query_catalog(catalog, demand, sae, None, relax_tags)}

        narrower = odd_meet(demand, random_odd(rng))
        if not isinstance(narrower, NoOverlap):
            assert odd_compare(narrower, demand) in (Relation.EQUAL, Relation.SUBSUMED_BY)
            relaxed = {e.name for e in catalog_service.query_catalog(catalog, narrower, sae, None, relax_tags)}
            assert names <= relaxed

        previous = names
        for level in AdrlLevel:
            current = {e.name for e in catalog_service.query_catalog(catalog, demand, sae, level, relax_tags)}
            assert current <= previous
            previous = current
