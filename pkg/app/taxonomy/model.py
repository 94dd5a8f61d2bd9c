"""
Tipos de valor de la taxonomía: nivel SAE, ODD por categorías y nivel ADRL.

Todos los valores son inmutables. Las violaciones de invariantes se reportan
con InvalidValueError al construir el valor.
"""
import re
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from itertools import product
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from app.exceptions import InvalidValueError

STAR = "*"
UNICODE_STAR = "★"
STAR_TOKENS = frozenset({STAR, UNICODE_STAR})

COUNTRY_CODE_RE = re.compile(r"^[A-Z]{2}$")
ADRL_TOKEN_RE = re.compile(r"^adrl\s*[0-9]+$", re.IGNORECASE)
_TAG_FORBIDDEN_RE = re.compile(r"[\s|,*★]")


class SaeLevel(IntEnum):
    """Nivel de automatización SAE J3016 (nivel de responsabilidad)"""
    LEVEL_0 = 0
    LEVEL_1 = 1
    LEVEL_2 = 2
    LEVEL_3 = 3
    LEVEL_4 = 4
    LEVEL_5 = 5

    @property
    def description(self) -> str:
        return _SAE_NAMES[self]

    @classmethod
    def parse(cls, value) -> "SaeLevel":
        try:
            return cls(int(value))
        except (TypeError, ValueError):
            raise InvalidValueError(f"Nivel SAE fuera de rango: {value!r}", {"value": value})


_SAE_NAMES = {
    SaeLevel.LEVEL_0: "No Driving Automation",
    SaeLevel.LEVEL_1: "Driver Assistance",
    SaeLevel.LEVEL_2: "Partial Driving Automation",
    SaeLevel.LEVEL_3: "Conditional Driving Automation",
    SaeLevel.LEVEL_4: "High Driving Automation",
    SaeLevel.LEVEL_5: "Full Driving Automation",
}


class AdrlLevel(IntEnum):
    """Automated Driving Readiness Level, de 1 a 9"""
    ADRL_1 = 1
    ADRL_2 = 2
    ADRL_3 = 3
    ADRL_4 = 4
    ADRL_5 = 5
    ADRL_6 = 6
    ADRL_7 = 7
    ADRL_8 = 8
    ADRL_9 = 9

    @property
    def token(self) -> str:
        return f"ADRL{int(self)}"

    @classmethod
    def parse(cls, value) -> "AdrlLevel":
        try:
            return cls(int(value))
        except (TypeError, ValueError):
            raise InvalidValueError(f"ADRL fuera de rango: {value!r}", {"value": value})


class Relation(Enum):
    """Resultado de comparar dos valores bajo el orden de permisividad"""
    EQUAL = "Equal"
    SUPERSEDES = "Supersedes"
    SUBSUMED_BY = "SubsumedBy"
    INCOMPARABLE = "Incomparable"

    def inverse(self) -> "Relation":
        if self is Relation.SUPERSEDES:
            return Relation.SUBSUMED_BY
        if self is Relation.SUBSUMED_BY:
            return Relation.SUPERSEDES
        return self

    @property
    def covers(self) -> bool:
        """True si el lado izquierdo es al menos tan permisivo como el derecho"""
        return self in (Relation.EQUAL, Relation.SUPERSEDES)


@dataclass(frozen=True)
class CountryScope:
    """Países permitidos; codes=None significa cualquier país (★)"""
    codes: Optional[FrozenSet[str]] = None

    def __post_init__(self):
        if self.codes is None:
            return
        codes = frozenset(self.codes)
        if not codes:
            raise InvalidValueError("La lista de países no puede estar vacía")
        invalid = sorted(c for c in codes if not isinstance(c, str) or not COUNTRY_CODE_RE.match(c))
        if invalid:
            raise InvalidValueError(
                f"Códigos de país inválidos: {', '.join(map(str, invalid))}",
                {"codes": invalid}
            )
        object.__setattr__(self, "codes", codes)

    @classmethod
    def any(cls) -> "CountryScope":
        return cls(None)

    @classmethod
    def listed(cls, codes: Iterable[str]) -> "CountryScope":
        return cls(frozenset(codes))

    @property
    def is_any(self) -> bool:
        return self.codes is None

    def sorted_codes(self) -> Tuple[str, ...]:
        return tuple(sorted(self.codes or ()))


class RoadUserScope(IntEnum):
    """Usuarios de la vía; el valor entero sigue el orden de permisividad"""
    AUTOMATED_ONLY = 0
    MIXED_NO_VRU = 1
    ANY = 2

    @property
    def code(self) -> str:
        return {0: "A", 1: "P", 2: STAR}[int(self)]


class Light(IntEnum):
    DAYLIGHT_ONLY = 0
    DAY_AND_NIGHT = 1

    @property
    def code(self) -> str:
        return "L" if self is Light.DAYLIGHT_ONLY else "N"


class Wetness(IntEnum):
    DRY_ONLY = 0
    WET = 1
    ICE_SNOW = 2

    @property
    def code(self) -> str:
        return "DRI"[int(self)]


@dataclass(frozen=True)
class RoadTypeSet:
    """Tipos de vía como conjunto de banderas"""
    h_core: bool = False
    h_ext: bool = False
    urban: bool = False
    country: bool = False
    special: bool = False

    def __post_init__(self):
        if self.h_ext and not self.h_core:
            raise InvalidValueError("H+ requiere H: h_ext implica h_core")
        if not any(self.flags):
            raise InvalidValueError("El conjunto de tipos de vía no puede estar vacío")

    @classmethod
    def any(cls) -> "RoadTypeSet":
        return cls(True, True, True, True, True)

    @classmethod
    def from_flags(cls, flags: Tuple[bool, ...]) -> "RoadTypeSet":
        return cls(*flags)

    @classmethod
    def all_valid(cls) -> Tuple["RoadTypeSet", ...]:
        """Las 23 combinaciones válidas de banderas"""
        values = []
        for flags in product((False, True), repeat=5):
            h_core, h_ext = flags[0], flags[1]
            if (h_ext and not h_core) or not any(flags):
                continue
            values.append(cls(*flags))
        return tuple(values)

    @property
    def flags(self) -> Tuple[bool, bool, bool, bool, bool]:
        return (self.h_core, self.h_ext, self.urban, self.country, self.special)

    @property
    def is_any(self) -> bool:
        return all(self.flags)

    def tokens(self) -> Tuple[str, ...]:
        """Tokens en orden canónico: H+ o H, luego U, C, S"""
        tokens = []
        if self.h_ext:
            tokens.append("H+")
        elif self.h_core:
            tokens.append("H")
        if self.urban:
            tokens.append("U")
        if self.country:
            tokens.append("C")
        if self.special:
            tokens.append("S")
        return tuple(tokens)


@dataclass(frozen=True)
class EnvScope:
    """Condiciones ambientales: luz, humedad de la calzada y niebla"""
    light: Light = Light.DAY_AND_NIGHT
    wetness: Wetness = Wetness.ICE_SNOW
    fog: bool = False

    def __post_init__(self):
        object.__setattr__(self, "light", Light(self.light))
        object.__setattr__(self, "wetness", Wetness(self.wetness))
        object.__setattr__(self, "fog", bool(self.fog))

    @classmethod
    def top(cls) -> "EnvScope":
        return cls(Light.DAY_AND_NIGHT, Wetness.ICE_SNOW, True)

    @classmethod
    def all_values(cls) -> Tuple["EnvScope", ...]:
        return tuple(cls(light, wetness, fog) for light, wetness, fog in product(Light, Wetness, (False, True)))

    @property
    def is_top(self) -> bool:
        return self == EnvScope.top()

    def code(self) -> str:
        return self.light.code + self.wetness.code + ("F" if self.fog else "")


class VelocityClass(IntEnum):
    V0 = 0
    V1 = 1
    V2 = 2
    V3 = 3
    V4 = 4
    UNLIMITED = 5

    @property
    def code(self) -> str:
        return STAR if self is VelocityClass.UNLIMITED else f"v{int(self)}"


VELOCITY_BOUNDS_KMH: Dict[VelocityClass, int] = {
    VelocityClass.V0: 7,
    VelocityClass.V1: 12,
    VelocityClass.V2: 25,
    VelocityClass.V3: 60,
    VelocityClass.V4: 130,
}


def velocity_bound_kmh(velocity: VelocityClass) -> Optional[int]:
    """Límite superior en km/h; None para ★ (sin límite)"""
    return VELOCITY_BOUNDS_KMH.get(VelocityClass(velocity))


def normalize_tag(text: str) -> str:
    """Recorta, pasa a minúsculas y elimina los espacios internos de un requisito"""
    return "".join(text.split()).lower()


def validate_tag(tag: str) -> None:
    if not isinstance(tag, str) or not tag:
        raise InvalidValueError("Los requisitos adicionales no pueden estar vacíos")
    if tag != tag.lower():
        raise InvalidValueError(f"Requisito '{tag}' debe estar en minúsculas", {"tag": tag})
    if tag == "none":
        raise InvalidValueError("'none' no es un requisito adicional válido", {"tag": tag})
    if _TAG_FORBIDDEN_RE.search(tag):
        raise InvalidValueError(f"Requisito '{tag}' contiene caracteres no permitidos", {"tag": tag})
    if ADRL_TOKEN_RE.match(tag):
        raise InvalidValueError(f"Requisito '{tag}' se confunde con un ADRL", {"tag": tag})


@dataclass(frozen=True, eq=False)
class OddDescriptor:
    """
    ODD de nivel intermedio: cinco categorías más requisitos adicionales.

    La igualdad es semántica: el orden de los requisitos no cuenta.
    """
    countries: CountryScope = field(default_factory=CountryScope.any)
    road_users: RoadUserScope = RoadUserScope.ANY
    road_types: RoadTypeSet = field(default_factory=RoadTypeSet.any)
    environment: EnvScope = field(default_factory=EnvScope.top)
    velocity: VelocityClass = VelocityClass.UNLIMITED
    additional_requirements: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "road_users", RoadUserScope(self.road_users))
        object.__setattr__(self, "velocity", VelocityClass(self.velocity))
        tags = tuple(self.additional_requirements)
        for tag in tags:
            validate_tag(tag)
        if len(set(tags)) != len(tags):
            raise InvalidValueError("Requisitos adicionales duplicados", {"tags": list(tags)})
        object.__setattr__(self, "additional_requirements", tags)

    @property
    def tags(self) -> FrozenSet[str]:
        return frozenset(self.additional_requirements)

    def _key(self):
        return (self.countries, self.road_users, self.road_types, self.environment, self.velocity, self.tags)

    def __eq__(self, other):
        if not isinstance(other, OddDescriptor):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def is_top(self) -> bool:
        return self == odd_top()

    def replace(self, **changes) -> "OddDescriptor":
        values = {
            "countries": self.countries,
            "road_users": self.road_users,
            "road_types": self.road_types,
            "environment": self.environment,
            "velocity": self.velocity,
            "additional_requirements": self.additional_requirements,
        }
        values.update(changes)
        return OddDescriptor(**values)


def odd_top() -> OddDescriptor:
    """El ODD más permisivo: todas las categorías en ★ y sin requisitos"""
    return OddDescriptor()


@dataclass(frozen=True)
class SourceSpan:
    """Rango semiabierto de bytes (UTF-8) sobre el texto de entrada"""
    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise InvalidValueError(f"Rango inválido: {self.start}..{self.end}")

    def __str__(self) -> str:
        return f"{self.start}..{self.end}"


@dataclass(frozen=True)
class SourceNote:
    """Hallazgo del parser en el texto original que no altera el valor"""
    kind: str  # "duplicate" | "substituted"
    field: str
    token: str
    span: Optional[SourceSpan] = None


@dataclass(frozen=True)
class TaxonomyRecord:
    """Nivel SAE + ODD + ADRL opcional: la unidad de clasificación"""
    sae: SaeLevel
    odd: OddDescriptor = field(default_factory=odd_top)
    adrl: Optional[AdrlLevel] = None
    # Información de origen rellenada por el parser; no participa en la igualdad
    notes: Tuple[SourceNote, ...] = field(default=(), compare=False, repr=False)
    field_spans: Dict[str, SourceSpan] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sae", SaeLevel.parse(self.sae))
        if self.adrl is not None:
            object.__setattr__(self, "adrl", AdrlLevel.parse(self.adrl))

    @property
    def rated(self) -> bool:
        return self.adrl is not None

    def span_of(self, field_name: str) -> Optional[SourceSpan]:
        return self.field_spans.get(field_name)
