import random

import pytest

from app.services.catalog_service import BUNDLED_CATALOG, catalog_service
from app.services.parser_service import parser_service

# Cadenas de la taxonomía tal como aparecen en la literatura
STEP1_ODD = "US | ★ | H+ | NR | v3 | none"
STEP2_RECORD = "4 | US | ★ | H+ | IF | v3 | none"
STEP3_RECORD = "4 | US | ★ | H+ | IF | v3 | none | ADRL9"
EXAMPLE_RECORDS = {
    "Truck highway pilot": "4 | US | ★ | H+ | NR | v4 | ADRL6",
    "Valet Parking (automated only)": "4 | ★ | A | S | ★ | v0",
    "Valet Parking": "4 | ★ | ★ | S | ★ | v0",
    "Highway Pilot": "3 | DE US | ★ | H | LD | v3 | vehicleahead, noglare | ADRL9",
    "Robotaxis": "4 | US | ★ | H+U | NR | v3 | onlySF | ADRL9",
    "Mining trucks": "4 | ★ | ★ | S | ★ | v3 | ADRL9",
}


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture
def bundled_catalog():
    catalog, diagnostics = catalog_service.read_catalog(BUNDLED_CATALOG)
    assert diagnostics == []
    return catalog


@pytest.fixture
def record():
    """Parsea un registro que debe ser válido"""
    def _parse(text):
        result = parser_service.parse_record(text)
        assert result.ok, [d.render() for d in result.diagnostics]
        return result.value
    return _parse


@pytest.fixture
def odd():
    def _parse(text):
        result = parser_service.parse_odd(text)
        assert result.ok, [d.render() for d in result.diagnostics]
        return result.value
    return _parse
