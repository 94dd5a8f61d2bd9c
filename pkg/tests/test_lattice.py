import random
from itertools import product

import pytest

from app.taxonomy.lattice import (
    NoOverlap,
    combine,
    dimension_compare,
    odd_compare,
    odd_compare_dimensions,
    odd_join,
    odd_meet,
)
from app.taxonomy.model import (
    CountryScope,
    EnvScope,
    Light,
    Relation,
    RoadTypeSet,
    RoadUserScope,
    VelocityClass,
    Wetness,
    odd_top,
)
from tests.generators import REDUCED_COUNTRIES, REDUCED_TAGS, reduced_universe

DIMENSION_VALUES = {
    "countries": REDUCED_COUNTRIES,
    "users": tuple(RoadUserScope),
    "roads": RoadTypeSet.all_valid(),
    "env": EnvScope.all_values(),
    "velocity": tuple(VelocityClass),
    "tags": tuple(frozenset(tags) for tags in REDUCED_TAGS),
}


def below(a, b) -> bool:
    """a ⊑ b: b es al menos tan permisivo como a"""
    return odd_compare(b, a).covers


@pytest.fixture(scope="module")
def universe():
    return reduced_universe()


def test_reduced_universe_size(universe):
    assert len(universe) == 4 * 3 * 23 * 12 * 6 * 4


@pytest.mark.parametrize("name", list(DIMENSION_VALUES))
def test_dimension_order_laws(name):
    values = DIMENSION_VALUES[name]
    for a in values:
        assert dimension_compare(a, a) is Relation.EQUAL
    for a, b in product(values, repeat=2):
        relation = dimension_compare(a, b)
        assert dimension_compare(b, a) is relation.inverse()
        assert (relation is Relation.EQUAL) == (a == b)
    for a, b, c in product(values, repeat=3):
        if dimension_compare(b, a).covers and dimension_compare(c, b).covers:
            assert dimension_compare(c, a).covers


def test_dimension_examples():
    nr = EnvScope(Light.DAY_AND_NIGHT, Wetness.WET)
    ld = EnvScope(Light.DAYLIGHT_ONLY, Wetness.DRY_ONLY)
    assert dimension_compare(nr, ld) is Relation.SUPERSEDES
    assert dimension_compare(
        EnvScope(Light.DAYLIGHT_ONLY, Wetness.ICE_SNOW), EnvScope(Light.DAY_AND_NIGHT, Wetness.DRY_ONLY)
    ) is Relation.INCOMPARABLE
    assert dimension_compare(CountryScope.any(), CountryScope.listed(["DE"])) is Relation.SUPERSEDES
    assert dimension_compare(CountryScope.listed(["DE"]), CountryScope.listed(["US"])) is Relation.INCOMPARABLE
    h_plus = RoadTypeSet(h_core=True, h_ext=True)
    assert dimension_compare(h_plus, RoadTypeSet(h_core=True)) is Relation.SUPERSEDES
    assert dimension_compare(frozenset(), frozenset({"noglare"})) is Relation.SUPERSEDES


def test_dimension_compare_rejects_mixed_types():
    with pytest.raises(TypeError):
        dimension_compare(RoadUserScope.ANY, VelocityClass.V0)


def test_combine_product_rule():
    assert combine([Relation.EQUAL, Relation.EQUAL]) is Relation.EQUAL
    assert combine([Relation.EQUAL, Relation.SUPERSEDES]) is Relation.SUPERSEDES
    assert combine([Relation.SUBSUMED_BY, Relation.EQUAL]) is Relation.SUBSUMED_BY
    assert combine([Relation.SUPERSEDES, Relation.SUBSUMED_BY]) is Relation.INCOMPARABLE
    assert combine([Relation.INCOMPARABLE, Relation.EQUAL]) is Relation.INCOMPARABLE


def test_odd_compare_examples(odd):
    a = odd("US | ★ | H+ | NR | v4")
    b = odd("US | ★ | H | LD | v3")
    assert odd_compare(a, b) is Relation.SUPERSEDES
    assert odd_compare(b, a) is Relation.SUBSUMED_BY
    trucks = odd("US | ★ | H+ | NR | v4")
    pilot = odd("DE US | ★ | H | LD | v3 | vehicleahead, noglare")
    relations = dict(odd_compare_dimensions(trucks, pilot))
    assert relations["countries"] is Relation.SUBSUMED_BY
    assert relations["roads"] is Relation.SUPERSEDES
    assert odd_compare(trucks, pilot) is Relation.INCOMPARABLE


def test_top_supersedes_everything(universe):
    top = odd_top()
    for d in universe:
        assert odd_compare(top, d) is (Relation.EQUAL if d == top else Relation.SUPERSEDES)
        assert odd_meet(top, d) == d
        assert odd_join(top, d) == top


def test_meet_without_overlap(odd):
    de = odd("DE | ★ | U | ★ | ★")
    us = odd("US | ★ | U | ★ | ★")
    result = odd_meet(de, us)
    assert isinstance(result, NoOverlap)
    assert result.axis == "countries"
    assert not result
    assert odd_meet(odd("★ | ★ | S | ★ | ★"), odd("★ | ★ | U | ★ | ★")) == NoOverlap("roads")


def test_meet_merges_tags(odd):
    a = odd("DE US | ★ | H+ | NR | v4 | noglare")
    b = odd("US | P | H | ★ | v3 | vehicleahead")
    meet = odd_meet(a, b)
    assert meet == odd("US | P | H | NR | v3 | noglare, vehicleahead")
    assert odd_join(a, b) == odd("DE US | ★ | H+ | ★ | v4")


def check_lattice_laws(a, b, c):
    # Orden
    assert odd_compare(a, a) is Relation.EQUAL
    relation = odd_compare(a, b)
    assert odd_compare(b, a) is relation.inverse()
    assert (relation is Relation.EQUAL) == (a == b)
    if below(a, b) and below(b, c):
        assert below(a, c)

    # Join: mínima cota superior
    join = odd_join(a, b)
    assert join == odd_join(b, a)
    assert odd_join(a, a) == a
    assert odd_join(join, c) == odd_join(a, odd_join(b, c))
    assert below(a, join) and below(b, join)
    if below(a, c) and below(b, c):
        assert below(join, c)
    assert below(a, b) == (join == b)

    # Meet: máxima cota inferior cuando existe
    meet = odd_meet(a, b)
    if meet:
        assert below(meet, a) and below(meet, b)
        if below(c, a) and below(c, b):
            assert below(c, meet)
    else:
        assert not (below(c, a) and below(c, b))


def test_lattice_laws_sampled(universe):
    rng = random.Random(7)
    for _ in range(3000):
        check_lattice_laws(rng.choice(universe), rng.choice(universe), rng.choice(universe))


def test_lattice_laws_on_related_triples(universe):
    """Tríos encadenados para ejercitar las ramas donde a ⊑ b ⊑ c"""
    rng = random.Random(11)
    for _ in range(2000):
        a = rng.choice(universe)
        b = odd_join(a, rng.choice(universe))
        c = odd_join(b, rng.choice(universe))
        check_lattice_laws(a, b, c)
        check_lattice_laws(c, b, a)


@pytest.mark.slow
def test_lattice_laws_million_triples(universe):
    rng = random.Random(1)
    for _ in range(1_000_000):
        check_lattice_laws(rng.choice(universe), rng.choice(universe), rng.choice(universe))
