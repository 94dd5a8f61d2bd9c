"""
Órdenes parciales por dimensión y operaciones del retículo producto.

"Más permisivo" es "mayor": ★ está arriba en todas las categorías y, en los
requisitos adicionales, tener menos requisitos es más permisivo.
"""
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Tuple, Union

from app.taxonomy.model import (
    CountryScope,
    EnvScope,
    Light,
    OddDescriptor,
    Relation,
    RoadTypeSet,
    RoadUserScope,
    VelocityClass,
    Wetness,
)

CATEGORY_DIMENSIONS = ("countries", "users", "roads", "env", "velocity")
ALL_DIMENSIONS = CATEGORY_DIMENSIONS + ("tags",)


@dataclass(frozen=True)
class NoOverlap:
    """Resultado de un meet sin condiciones comunes en el eje indicado"""
    axis: str

    def __bool__(self) -> bool:
        return False


def _relation(a_le_b: bool, b_le_a: bool) -> Relation:
    if a_le_b and b_le_a:
        return Relation.EQUAL
    if b_le_a:
        return Relation.SUPERSEDES
    if a_le_b:
        return Relation.SUBSUMED_BY
    return Relation.INCOMPARABLE


def _total(a: int, b: int) -> Relation:
    return _relation(a <= b, b <= a)


def _set_leq(a: FrozenSet, b: FrozenSet) -> bool:
    return a <= b


def combine(relations: Iterable[Relation]) -> Relation:
    """Regla del orden producto sobre relaciones por dimensión"""
    relations = list(relations)
    if any(r is Relation.INCOMPARABLE for r in relations):
        return Relation.INCOMPARABLE
    up = any(r is Relation.SUPERSEDES for r in relations)
    down = any(r is Relation.SUBSUMED_BY for r in relations)
    if up and down:
        return Relation.INCOMPARABLE
    if up:
        return Relation.SUPERSEDES
    if down:
        return Relation.SUBSUMED_BY
    return Relation.EQUAL


def _countries_compare(a: CountryScope, b: CountryScope) -> Relation:
    if a.is_any or b.is_any:
        return _relation(b.is_any, a.is_any)
    return _relation(_set_leq(a.codes, b.codes), _set_leq(b.codes, a.codes))


def _roads_compare(a: RoadTypeSet, b: RoadTypeSet) -> Relation:
    a_le_b = all(y or not x for x, y in zip(a.flags, b.flags))
    b_le_a = all(x or not y for x, y in zip(a.flags, b.flags))
    return _relation(a_le_b, b_le_a)


def _env_compare(a: EnvScope, b: EnvScope) -> Relation:
    return combine((
        _total(a.light, b.light),
        _total(a.wetness, b.wetness),
        _total(a.fog, b.fog),
    ))


def requirements_compare(a: Iterable[str], b: Iterable[str]) -> Relation:
    """Menos requisitos = más permisivo; los requisitos se comparan como texto exacto"""
    a, b = frozenset(a), frozenset(b)
    # a ⊑ b  <=>  b impone un subconjunto de las restricciones de a
    return _relation(_set_leq(b, a), _set_leq(a, b))


def dimension_compare(a, b) -> Relation:
    """Compara dos valores de la misma dimensión"""
    if type(a) is not type(b):
        raise TypeError(f"Dimensiones distintas: {type(a).__name__} vs {type(b).__name__}")
    if isinstance(a, CountryScope):
        return _countries_compare(a, b)
    if isinstance(a, RoadTypeSet):
        return _roads_compare(a, b)
    if isinstance(a, EnvScope):
        return _env_compare(a, b)
    if isinstance(a, (RoadUserScope, VelocityClass, Light, Wetness)):
        return _total(a, b)
    if isinstance(a, (frozenset, tuple)):
        return requirements_compare(a, b)
    raise TypeError(f"Tipo de dimensión no soportado: {type(a).__name__}")


def odd_dimensions(odd: OddDescriptor) -> Tuple:
    return (odd.countries, odd.road_users, odd.road_types, odd.environment, odd.velocity, odd.tags)


def odd_compare_dimensions(a: OddDescriptor, b: OddDescriptor) -> List[Tuple[str, Relation]]:
    """Relación por dimensión, incluyendo los requisitos adicionales como 'tags'"""
    return [
        (name, dimension_compare(x, y))
        for name, x, y in zip(ALL_DIMENSIONS, odd_dimensions(a), odd_dimensions(b))
    ]


def odd_compare(a: OddDescriptor, b: OddDescriptor) -> Relation:
    return combine(relation for _, relation in odd_compare_dimensions(a, b))


def _countries_join(a: CountryScope, b: CountryScope) -> CountryScope:
    if a.is_any or b.is_any:
        return CountryScope.any()
    return CountryScope.listed(a.codes | b.codes)


def _countries_meet(a: CountryScope, b: CountryScope) -> Union[CountryScope, None]:
    if a.is_any:
        return b
    if b.is_any:
        return a
    common = a.codes & b.codes
    return CountryScope.listed(common) if common else None


def _ordered_tags(first: Tuple[str, ...], second: Tuple[str, ...], keep: FrozenSet[str]) -> Tuple[str, ...]:
    seen = []
    for tag in first + second:
        if tag in keep and tag not in seen:
            seen.append(tag)
    return tuple(seen)


def odd_join(a: OddDescriptor, b: OddDescriptor) -> OddDescriptor:
    """Mínima cota superior componente a componente"""
    return OddDescriptor(
        countries=_countries_join(a.countries, b.countries),
        road_users=max(a.road_users, b.road_users),
        road_types=RoadTypeSet.from_flags(tuple(x or y for x, y in zip(a.road_types.flags, b.road_types.flags))),
        environment=EnvScope(
            max(a.environment.light, b.environment.light),
            max(a.environment.wetness, b.environment.wetness),
            a.environment.fog or b.environment.fog,
        ),
        velocity=max(a.velocity, b.velocity),
        additional_requirements=_ordered_tags(
            a.additional_requirements, b.additional_requirements, a.tags & b.tags
        ),
    )


def odd_meet(a: OddDescriptor, b: OddDescriptor) -> Union[OddDescriptor, NoOverlap]:
    """Máxima cota inferior; NoOverlap si países o tipos de vía no se solapan"""
    countries = _countries_meet(a.countries, b.countries)
    if countries is None:
        return NoOverlap("countries")
    road_flags = tuple(x and y for x, y in zip(a.road_types.flags, b.road_types.flags))
    if not any(road_flags):
        return NoOverlap("roads")
    return OddDescriptor(
        countries=countries,
        road_users=min(a.road_users, b.road_users),
        road_types=RoadTypeSet.from_flags(road_flags),
        environment=EnvScope(
            min(a.environment.light, b.environment.light),
            min(a.environment.wetness, b.environment.wetness),
            a.environment.fog and b.environment.fog,
        ),
        velocity=min(a.velocity, b.velocity),
        additional_requirements=_ordered_tags(
            a.additional_requirements, b.additional_requirements, a.tags | b.tags
        ),
    )
