"""Generadores de valores aleatorios y universo reducido para las pruebas de propiedades"""
import random
from itertools import product
from typing import List

from app.taxonomy.model import (
    AdrlLevel,
    CountryScope,
    EnvScope,
    OddDescriptor,
    RoadTypeSet,
    RoadUserScope,
    SaeLevel,
    TaxonomyRecord,
    VelocityClass,
)

COUNTRY_POOL = ("DE", "US", "JP", "FR", "AT")
TAG_POOL = ("vehicleahead", "noglare", "onlysf", "geofenced")

REDUCED_COUNTRIES = (
    CountryScope.any(),
    CountryScope.listed(["DE"]),
    CountryScope.listed(["US"]),
    CountryScope.listed(["DE", "US"]),
)
REDUCED_TAGS = ((), ("vehicleahead",), ("noglare",), ("vehicleahead", "noglare"))


def reduced_universe() -> List[OddDescriptor]:
    """Producto completo: 4 x 3 x 23 x 12 x 6 x 4 descriptores"""
    return [
        OddDescriptor(countries, users, roads, env, velocity, tags)
        for countries, users, roads, env, velocity, tags in product(
            REDUCED_COUNTRIES,
            RoadUserScope,
            RoadTypeSet.all_valid(),
            EnvScope.all_values(),
            VelocityClass,
            REDUCED_TAGS,
        )
    ]


def random_countries(rng: random.Random) -> CountryScope:
    if rng.random() < 0.3:
        return CountryScope.any()
    return CountryScope.listed(rng.sample(COUNTRY_POOL, rng.randint(1, 3)))


def random_odd(rng: random.Random, countries_pool=None, tag_pool=TAG_POOL) -> OddDescriptor:
    countries = rng.choice(countries_pool) if countries_pool else random_countries(rng)
    return OddDescriptor(
        countries=countries,
        road_users=rng.choice(list(RoadUserScope)),
        road_types=rng.choice(RoadTypeSet.all_valid()),
        environment=rng.choice(EnvScope.all_values()),
        velocity=rng.choice(list(VelocityClass)),
        additional_requirements=tuple(rng.sample(tag_pool, rng.randint(0, min(2, len(tag_pool))))),
    )


def random_record(rng: random.Random) -> TaxonomyRecord:
    adrl = rng.choice([None] + list(AdrlLevel))
    return TaxonomyRecord(rng.choice(list(SaeLevel)), random_odd(rng), adrl)
