import pytest

from app.exceptions import InvalidValueError
from app.services.parser_service import parser_service
from app.taxonomy.diagnostics import Severity
from app.taxonomy.model import (
    AdrlLevel,
    CountryScope,
    EnvScope,
    Light,
    OddDescriptor,
    RoadTypeSet,
    RoadUserScope,
    SaeLevel,
    SourceSpan,
    TaxonomyRecord,
    VelocityClass,
    Wetness,
    odd_top,
)
from tests.conftest import EXAMPLE_RECORDS, STEP1_ODD, STEP2_RECORD, STEP3_RECORD
from tests.generators import random_record


def rule_ids(result):
    return [d.rule_id for d in result.diagnostics]


@pytest.mark.parametrize("text", list(EXAMPLE_RECORDS.values()) + [STEP2_RECORD, STEP3_RECORD])
def test_literature_records_parse_cleanly(text):
    result = parser_service.parse_record(text)
    assert result.ok
    assert result.diagnostics == []


def test_step1_odd_parses_cleanly():
    result = parser_service.parse_odd(STEP1_ODD)
    assert result.ok
    assert result.value.additional_requirements == ()
    assert result.value.environment == EnvScope(Light.DAY_AND_NIGHT, Wetness.WET, False)


def test_highway_pilot_record(record):
    value = record(EXAMPLE_RECORDS["Highway Pilot"])
    assert value.sae is SaeLevel.LEVEL_3
    assert value.odd.countries == CountryScope.listed(["DE", "US"])
    assert value.odd.road_users is RoadUserScope.ANY
    assert value.odd.road_types == RoadTypeSet(h_core=True)
    assert value.odd.environment == EnvScope(Light.DAYLIGHT_ONLY, Wetness.DRY_ONLY, False)
    assert value.odd.velocity is VelocityClass.V3
    assert value.odd.additional_requirements == ("vehicleahead", "noglare")
    assert value.adrl is AdrlLevel.ADRL_9


def test_seventh_field_disambiguation(record):
    truck = record(EXAMPLE_RECORDS["Truck highway pilot"])
    assert truck.adrl is AdrlLevel.ADRL_6
    assert truck.odd.additional_requirements == ()

    robotaxi = record(EXAMPLE_RECORDS["Robotaxis"])
    assert robotaxi.odd.road_types == RoadTypeSet(h_core=True, h_ext=True, urban=True)
    assert robotaxi.odd.additional_requirements == ("onlysf",)

    extras_only = record("4 | US | ★ | H+ | NR | v3 | noglare")
    assert extras_only.adrl is None
    assert extras_only.odd.additional_requirements == ("noglare",)


def test_valet_parking_automated_only(record):
    value = record(EXAMPLE_RECORDS["Valet Parking (automated only)"])
    assert value.odd.road_users is RoadUserScope.AUTOMATED_ONLY
    assert value.odd.environment.is_top
    assert value.odd.velocity is VelocityClass.V0
    assert value.adrl is None


def test_absent_light_token_means_day_and_night(record):
    value = record(STEP3_RECORD)
    assert value.odd.environment == EnvScope(Light.DAY_AND_NIGHT, Wetness.ICE_SNOW, True)


def test_all_star_odd():
    result = parser_service.parse_odd("★ | ★ | ★ | ★ | ★")
    assert result.value == odd_top()


def test_case_insensitive_tokens(record):
    value = record("4 | de | * | h+u | nr | V3")
    assert parser_service.canonicalize(value) == "4 | DE | * | H+U | NR | v3 | none"


def test_invalid_sae_level():
    result = parser_service.parse_record("6 | US | ★ | H | LD | v3")
    assert result.value is None
    assert rule_ids(result) == ["P002"]
    assert result.diagnostics[0].span == SourceSpan(0, 1)


def test_missing_fields():
    result = parser_service.parse_odd("US | ★ | H+ | NR")
    assert rule_ids(result) == ["P001"]
    assert not result.ok


def test_trailing_garbage():
    result = parser_service.parse_record("4 | US | ★ | H+ | NR | v3 | none | ADRL9 | extra")
    assert rule_ids(result) == ["P004"]


def test_empty_field():
    result = parser_service.parse_record("4 |  | ★ | H | LD | v3")
    assert rule_ids(result) == ["P005"]


def test_adrl_out_of_range():
    result = parser_service.parse_record("4 | US | ★ | H+ | NR | v4 | ADRL12")
    assert rule_ids(result) == ["P006"]


def test_invalid_token_span_uses_utf8_bytes():
    # "4 | ★ | " ocupa 8 caracteres y 10 bytes
    result = parser_service.parse_record("4 | ★ | X | S | ★ | v0")
    assert rule_ids(result) == ["P003"]
    assert result.diagnostics[0].span == SourceSpan(10, 11)
    assert result.diagnostics[0].severity is Severity.ERROR


def test_all_errors_are_reported():
    result = parser_service.parse_record("4 | U1 | Q | H | LZ | v9")
    assert rule_ids(result) == ["P003", "P003", "P003", "P003"]
    starts = [d.span.start for d in result.diagnostics]
    assert starts == sorted(starts)


def test_duplicates_and_substitutions_become_notes(record):
    value = record("4 | DE DE | ★ | H+ | LNR | v3")
    assert value.odd.countries == CountryScope.listed(["DE"])
    assert value.odd.environment == EnvScope(Light.DAY_AND_NIGHT, Wetness.WET, False)
    kinds = sorted((note.kind, note.field, note.token) for note in value.notes)
    assert kinds == [("duplicate", "countries", "DE"), ("substituted", "env", "N")]


def test_parse_any_dispatch():
    assert isinstance(parser_service.parse_any(STEP1_ODD).value, OddDescriptor)
    assert isinstance(parser_service.parse_any(STEP3_RECORD).value, TaxonomyRecord)


def test_parse_dimension():
    assert parser_service.parse_dimension("roads", "H+U") == RoadTypeSet(h_core=True, h_ext=True, urban=True)
    assert parser_service.parse_dimension("country", "DE") == CountryScope.listed(["DE"])
    with pytest.raises(InvalidValueError):
        parser_service.parse_dimension("roads", "Z")
    with pytest.raises(InvalidValueError):
        parser_service.parse_dimension("weather", "N")


def test_canonical_forms(record):
    assert parser_service.canonicalize(record("4 | ★ | A | S | ★ | v0")) == "4 | * | A | S | * | v0 | none"
    assert parser_service.canonicalize(record("5 | ★ | ★ | ★ | ★ | ★ | none")) == "5 | * | * | * | * | * | none"
    assert parser_service.canonicalize(record("3 | US DE | ★ | H | LD | v3 | vehicleahead, noglare | ADRL9")) == (
        "3 | DE US | * | H | LD | v3 | noglare, vehicleahead | ADRL9"
    )
    assert parser_service.canonicalize(record("4 | US | ★ | UH+ | RN | v3"), "unicode") == (
        "4 | US | ★ | H+U | NR | v3 | none"
    )
    # N, I y F juntos son el máximo del entorno y se emiten como estrella
    assert parser_service.canonicalize(record(STEP3_RECORD)) == "4 | US | * | H+ | * | v3 | none | ADRL9"


def test_round_trip_generated_records(rng):
    for _ in range(10_000):
        value = random_record(rng)
        for star_style in ("ascii", "unicode"):
            text = parser_service.canonicalize(value, star_style)
            result = parser_service.parse_record(text)
            assert result.ok, (text, [d.render() for d in result.diagnostics])
            assert result.value == value
            assert parser_service.canonicalize(result.value, star_style) == text


def test_explain_step1_odd(odd):
    lines = {line.category: line for line in parser_service.explain_odd(odd(STEP1_ODD))}
    assert lines["Country code"].description == "US (USA)"
    assert lines["Road users"].description == "anything in mixed traffic"
    assert lines["Environmental conditions"].description == (
        "day and night operation, in dry and wet conditions, but no ice, no snow, no fog"
    )
    assert lines["Velocity"].description == "< 60 km/h"
    assert lines["Additional requirements"].description == "None"


def test_explain_record_includes_sae_and_adrl(record):
    lines = parser_service.explain(record(EXAMPLE_RECORDS["Mining trucks"]))
    assert lines[0].category == "SAE level"
    assert lines[0].description == "High Driving Automation"
    assert lines[-1].category == "ADRL"
    assert lines[-1].description == "System in commercial use without safety driver"
    assert {line.category: line.description for line in lines}["Environmental conditions"] == (
        "all weather and light conditions"
    )
