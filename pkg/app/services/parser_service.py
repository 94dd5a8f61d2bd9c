import re
from dataclasses import dataclass
from itertools import accumulate
from typing import List, NamedTuple, Optional, Tuple, Union

from app.exceptions import InvalidValueError
from app.taxonomy.diagnostics import (
    EMPTY_FIELD,
    INVALID_ADRL,
    INVALID_SAE_LEVEL,
    INVALID_TOKEN,
    MISSING_FIELDS,
    TRAILING_GARBAGE,
    Diagnostic,
    ParseResult,
    Severity,
)
from app.taxonomy.iso3166 import country_label
from app.taxonomy.model import (
    STAR,
    STAR_TOKENS,
    UNICODE_STAR,
    AdrlLevel,
    CountryScope,
    EnvScope,
    Light,
    OddDescriptor,
    RoadTypeSet,
    RoadUserScope,
    SaeLevel,
    SourceNote,
    SourceSpan,
    TaxonomyRecord,
    VelocityClass,
    Wetness,
    normalize_tag,
    validate_tag,
    velocity_bound_kmh,
)
from app.taxonomy.readiness import adrl_description

ODD_FIELDS = ("countries", "users", "roads", "env", "velocity")
_SAE_RE = re.compile(r"^[0-9]$")
_ADRL_RE = re.compile(r"^adrl\s*([0-9]+)$", re.IGNORECASE)
_COUNTRY_TOKEN_RE = re.compile(r"^[A-Za-z]{2}$")
_VELOCITY_RE = re.compile(r"^v([0-4])$", re.IGNORECASE)

_USERS = {"A": RoadUserScope.AUTOMATED_ONLY, "P": RoadUserScope.MIXED_NO_VRU}
_LIGHT = {"L": Light.DAYLIGHT_ONLY, "N": Light.DAY_AND_NIGHT}
_WETNESS = {"D": Wetness.DRY_ONLY, "R": Wetness.WET, "I": Wetness.ICE_SNOW}

# Textos de la tabla de categorías
USER_TEXT = {
    RoadUserScope.ANY: "anything in mixed traffic",
    RoadUserScope.AUTOMATED_ONLY: "only automated traffic",
    RoadUserScope.MIXED_NO_VRU: "mixed traffic without VRU",
}
ROAD_TEXT = {
    "H": "highway (without construction sites)",
    "H+": "highway incl. driveway, departure, highway service area, construction site",
    "U": "urban",
    "C": "country incl. roads without lane markings",
    "S": "special road e.g. with special markers",
}
_LIGHT_TEXT = {Light.DAYLIGHT_ONLY: "daylight operation only", Light.DAY_AND_NIGHT: "day and night operation"}
_WETNESS_TEXT = {
    Wetness.DRY_ONLY: ("in dry conditions", ["no wet roads or rainfall", "no ice", "no snow"]),
    Wetness.WET: ("in dry and wet conditions", ["no ice", "no snow"]),
    Wetness.ICE_SNOW: ("in dry, wet, ice and snow conditions", []),
}


class ExplainLine(NamedTuple):
    category: str
    code: str
    description: str


@dataclass(frozen=True)
class _Field:
    text: str
    start: int  # índice de carácter, ya sin espacios
    end: int


class _Source:
    """Texto de entrada con conversión de índices de carácter a bytes UTF-8"""

    def __init__(self, text: str):
        self.text = text
        self._offsets = [0] + list(accumulate(len(ch.encode("utf-8")) for ch in text))

    def span(self, start: int, end: int) -> SourceSpan:
        return SourceSpan(self._offsets[start], self._offsets[end])

    def fields(self) -> List[_Field]:
        fields = []
        pos = 0
        for raw in self.text.split("|"):
            lead = len(raw) - len(raw.lstrip())
            stripped = raw.strip()
            start = pos + lead
            fields.append(_Field(stripped, start, start + len(stripped)))
            pos += len(raw) + 1
        return fields


class _FieldParser:
    """Acumula diagnósticos y notas mientras se interpretan los campos"""

    def __init__(self, source: _Source):
        self.source = source
        self.diagnostics: List[Diagnostic] = []
        self.notes: List[SourceNote] = []
        self.spans = {}

    def error(self, rule_id: str, message: str, start: int, end: int) -> None:
        self.diagnostics.append(Diagnostic(rule_id, Severity.ERROR, message, self.source.span(start, end)))

    def note(self, kind: str, field_name: str, token: str, start: int, end: int) -> None:
        self.notes.append(SourceNote(kind, field_name, token, self.source.span(start, end)))

    def _non_empty(self, f: _Field, name: str) -> bool:
        self.spans[name] = self.source.span(f.start, f.end)
        if not f.text:
            self.error(EMPTY_FIELD, f"El campo '{name}' está vacío", f.start, f.end)
            return False
        return True

    def sae(self, f: _Field) -> Optional[SaeLevel]:
        if not self._non_empty(f, "sae"):
            return None
        if _SAE_RE.match(f.text) and int(f.text) <= 5:
            return SaeLevel(int(f.text))
        self.error(INVALID_SAE_LEVEL, f"Nivel SAE inválido '{f.text}' (se espera 0-5)", f.start, f.end)
        return None

    def countries(self, f: _Field) -> Optional[CountryScope]:
        if not self._non_empty(f, "countries"):
            return None
        if f.text in STAR_TOKENS:
            return CountryScope.any()
        codes = []
        ok = True
        for match in re.finditer(r"\S+", f.text):
            token = match.group(0)
            start, end = f.start + match.start(), f.start + match.end()
            if not _COUNTRY_TOKEN_RE.match(token):
                self.error(INVALID_TOKEN, f"Código de país inválido '{token}'", start, end)
                ok = False
                continue
            code = token.upper()
            if code in codes:
                self.note("duplicate", "countries", code, start, end)
                continue
            codes.append(code)
        return CountryScope.listed(codes) if ok else None

    def users(self, f: _Field) -> Optional[RoadUserScope]:
        if not self._non_empty(f, "users"):
            return None
        if f.text in STAR_TOKENS:
            return RoadUserScope.ANY
        value = _USERS.get(f.text.upper())
        if value is None:
            self.error(INVALID_TOKEN, f"Usuarios de la vía inválidos '{f.text}'", f.start, f.end)
        return value

    def roads(self, f: _Field) -> Optional[RoadTypeSet]:
        if not self._non_empty(f, "roads"):
            return None
        if f.text in STAR_TOKENS:
            return RoadTypeSet.any()
        flags = dict(h_core=False, h_ext=False, urban=False, country=False, special=False)
        seen = set()
        ok = True
        text = f.text
        i = 0
        while i < len(text):
            if text[i].isspace():
                i += 1
                continue
            # Coincidencia más larga: H+ antes que H
            width = 2 if text[i:i + 2] in ("H+", "h+") else 1
            raw = text[i:i + width]
            token = raw.upper()
            start, end = f.start + i, f.start + i + width
            i += width
            if token not in ROAD_TEXT:
                self.error(INVALID_TOKEN, f"Tipo de vía inválido '{raw}'", start, end)
                ok = False
                continue
            if token in seen:
                self.note("duplicate", "roads", token, start, end)
            seen.add(token)
            if token in ("H", "H+"):
                flags["h_core"] = True
                flags["h_ext"] = flags["h_ext"] or token == "H+"
            else:
                flags[{"U": "urban", "C": "country", "S": "special"}[token]] = True
        return RoadTypeSet(**flags) if ok else None

    def env(self, f: _Field) -> Optional[EnvScope]:
        if not self._non_empty(f, "env"):
            return None
        if f.text in STAR_TOKENS:
            return EnvScope.top()
        lights: List[Light] = []
        wetness: List[Wetness] = []
        fog = False
        ok = True
        for i, ch in enumerate(f.text):
            if ch.isspace():
                continue
            token = ch.upper()
            start, end = f.start + i, f.start + i + 1
            if token in _LIGHT:
                value = _LIGHT[token]
                self._env_repeat(lights, value, token, start, end)
                lights.append(value)
            elif token in _WETNESS:
                value = _WETNESS[token]
                self._env_repeat(wetness, value, token, start, end)
                wetness.append(value)
            elif token == "F":
                if fog:
                    self.note("duplicate", "env", token, start, end)
                fog = True
            else:
                self.error(INVALID_TOKEN, f"Condición ambiental inválida '{ch}'", start, end)
                ok = False
        if not ok:
            return None
        # Sin token de luz o de humedad la categoría queda sin restringir
        return EnvScope(
            max(lights) if lights else Light.DAY_AND_NIGHT,
            max(wetness) if wetness else Wetness.ICE_SNOW,
            fog,
        )

    def _env_repeat(self, previous: list, value, token: str, start: int, end: int) -> None:
        if not previous:
            return
        kind = "duplicate" if value in previous else "substituted"
        self.note(kind, "env", token, start, end)

    def velocity(self, f: _Field) -> Optional[VelocityClass]:
        if not self._non_empty(f, "velocity"):
            return None
        if f.text in STAR_TOKENS:
            return VelocityClass.UNLIMITED
        match = _VELOCITY_RE.match(f.text)
        if not match:
            self.error(INVALID_TOKEN, f"Clase de velocidad inválida '{f.text}'", f.start, f.end)
            return None
        return VelocityClass(int(match.group(1)))

    def extras(self, f: _Field) -> Optional[Tuple[str, ...]]:
        if not self._non_empty(f, "extras"):
            return None
        if f.text.lower() == "none":
            return ()
        tags: List[str] = []
        ok = True
        pos = 0
        for piece in f.text.split(","):
            lead = len(piece) - len(piece.lstrip())
            start = f.start + pos + lead
            end = start + len(piece.strip())
            pos += len(piece) + 1
            tag = normalize_tag(piece)
            try:
                validate_tag(tag)
            except InvalidValueError:
                self.error(INVALID_TOKEN, f"Requisito adicional inválido '{piece.strip()}'", start, end)
                ok = False
                continue
            if tag in tags:
                self.note("duplicate", "extras", tag, start, end)
                continue
            tags.append(tag)
        return tuple(tags) if ok else None

    def adrl(self, f: _Field) -> Optional[AdrlLevel]:
        if not self._non_empty(f, "adrl"):
            return None
        match = _ADRL_RE.match(f.text)
        if not match:
            self.error(INVALID_TOKEN, f"Se esperaba un ADRL (ADRL1-ADRL9), se encontró '{f.text}'", f.start, f.end)
            return None
        level = int(match.group(1))
        if not 1 <= level <= 9:
            self.error(INVALID_ADRL, f"ADRL fuera de rango '{f.text}' (se espera 1-9)", f.start, f.end)
            return None
        return AdrlLevel(level)

    def odd(self, fields: List[_Field], extras: Optional[_Field]) -> Optional[OddDescriptor]:
        countries = self.countries(fields[0])
        users = self.users(fields[1])
        roads = self.roads(fields[2])
        env = self.env(fields[3])
        velocity = self.velocity(fields[4])
        tags = self.extras(extras) if extras is not None else ()
        values = (countries, users, roads, env, velocity, tags)
        if any(v is None for v in values):
            return None
        return OddDescriptor(countries, users, roads, env, velocity, tags)


class ParserService:
    """Servicio para interpretar y serializar cadenas de la taxonomía"""

    def parse_record(self, text: str) -> ParseResult[TaxonomyRecord]:
        """
        Interpreta un registro completo:
        sae | países | usuarios | vías | entorno | velocidad [| extras] [| ADRL]
        """
        source = _Source(text)
        parser = _FieldParser(source)
        fields = source.fields()
        if len(fields) < 6:
            parser.error(MISSING_FIELDS, f"Faltan campos: se esperaban al menos 6, hay {len(fields)}", 0, len(text))
            return self._result(None, parser)
        if len(fields) > 8:
            parser.error(
                TRAILING_GARBAGE,
                f"Demasiados campos: se esperaban como máximo 8, hay {len(fields)}",
                fields[8].start,
                len(text),
            )
            return self._result(None, parser)

        extras_field: Optional[_Field] = None
        adrl_field: Optional[_Field] = None
        if len(fields) == 7:
            if _ADRL_RE.match(fields[6].text):
                adrl_field = fields[6]
            else:
                extras_field = fields[6]
        elif len(fields) == 8:
            extras_field, adrl_field = fields[6], fields[7]

        sae = parser.sae(fields[0])
        odd = parser.odd(fields[1:6], extras_field)
        adrl = parser.adrl(adrl_field) if adrl_field is not None else None
        if sae is None or odd is None or (adrl_field is not None and adrl is None):
            return self._result(None, parser)
        record = TaxonomyRecord(
            sae=sae,
            odd=odd,
            adrl=adrl,
            notes=tuple(parser.notes),
            field_spans=dict(parser.spans),
        )
        return self._result(record, parser)

    def parse_odd(self, text: str) -> ParseResult[OddDescriptor]:
        """Interpreta la forma solo-ODD: países | usuarios | vías | entorno | velocidad [| extras]"""
        source = _Source(text)
        parser = _FieldParser(source)
        fields = source.fields()
        if len(fields) < 5:
            parser.error(MISSING_FIELDS, f"Faltan campos: se esperaban al menos 5, hay {len(fields)}", 0, len(text))
            return self._result(None, parser)
        if len(fields) > 6:
            parser.error(
                TRAILING_GARBAGE,
                f"Demasiados campos: se esperaban como máximo 6, hay {len(fields)}",
                fields[6].start,
                len(text),
            )
            return self._result(None, parser)
        odd = parser.odd(fields[:5], fields[5] if len(fields) == 6 else None)
        return self._result(odd, parser)

    def parse_any(self, text: str) -> ParseResult[Union[TaxonomyRecord, OddDescriptor]]:
        """Registro completo si el primer campo es un único dígito, si no solo-ODD"""
        first = text.split("|", 1)[0].strip()
        if _SAE_RE.match(first):
            return self.parse_record(text)
        return self.parse_odd(text)

    def parse_dimension(self, name: str, text: str):
        """Interpreta un valor suelto de una dimensión ('countries', 'roads', ...)"""
        aliases = {"country": "countries", "road_users": "users", "environment": "env", "tags": "extras"}
        name = aliases.get(name, name)
        if name not in ODD_FIELDS + ("extras",):
            raise InvalidValueError(f"Dimensión desconocida '{name}'", {"dimension": name})
        source = _Source(text.strip())
        parser = _FieldParser(source)
        value = getattr(parser, name)(_Field(source.text, 0, len(source.text)))
        if value is None:
            first = parser.diagnostics[0]
            raise InvalidValueError(first.message, {"dimension": name, "value": text})
        return value

    @staticmethod
    def _result(value, parser: _FieldParser) -> ParseResult:
        diagnostics = sorted(parser.diagnostics, key=Diagnostic.sort_key)
        if any(d.is_error for d in diagnostics):
            value = None
        return ParseResult(value=value, diagnostics=diagnostics)

    # Serialización canónica

    @staticmethod
    def _star(star_style: str) -> str:
        if star_style not in ("ascii", "unicode"):
            raise InvalidValueError(f"Estilo de estrella desconocido '{star_style}'")
        return UNICODE_STAR if star_style == "unicode" else STAR

    def canonical_fields(self, odd: OddDescriptor, star_style: str = "ascii") -> List[str]:
        star = self._star(star_style)
        countries = star if odd.countries.is_any else " ".join(odd.countries.sorted_codes())
        users = star if odd.road_users is RoadUserScope.ANY else odd.road_users.code
        roads = star if odd.road_types.is_any else "".join(odd.road_types.tokens())
        env = star if odd.environment.is_top else odd.environment.code()
        velocity = star if odd.velocity is VelocityClass.UNLIMITED else odd.velocity.code
        extras = ", ".join(sorted(odd.tags)) if odd.tags else "none"
        return [countries, users, roads, env, velocity, extras]

    def canonicalize(self, record: TaxonomyRecord, star_style: str = "ascii") -> str:
        fields = [str(int(record.sae))] + self.canonical_fields(record.odd, star_style)
        if record.adrl is not None:
            fields.append(record.adrl.token)
        return " | ".join(fields)

    def canonicalize_odd(self, odd: OddDescriptor, star_style: str = "ascii") -> str:
        return " | ".join(self.canonical_fields(odd, star_style))

    def odd_to_dict(self, odd: OddDescriptor) -> dict:
        """Valor estructurado para la salida JSON; ★ se representa como "*" """
        return {
            "countries": STAR if odd.countries.is_any else list(odd.countries.sorted_codes()),
            "users": odd.road_users.code,
            "roads": STAR if odd.road_types.is_any else list(odd.road_types.tokens()),
            "env": {
                "light": odd.environment.light.code,
                "wetness": odd.environment.wetness.code,
                "fog": odd.environment.fog,
            },
            "velocity": odd.velocity.code,
            "tags": sorted(odd.tags),
        }

    def to_dict(self, value: Union[TaxonomyRecord, OddDescriptor]) -> dict:
        if isinstance(value, OddDescriptor):
            return {"kind": "odd", "canonical": self.canonicalize_odd(value), "odd": self.odd_to_dict(value)}
        return {
            "kind": "record",
            "canonical": self.canonicalize(value),
            "sae": int(value.sae),
            "odd": self.odd_to_dict(value.odd),
            "adrl": None if value.adrl is None else int(value.adrl),
        }

    # Explicación en texto

    def explain_env(self, env: EnvScope) -> str:
        if env.is_top:
            return "all weather and light conditions"
        wet_text, exclusions = _WETNESS_TEXT[env.wetness]
        exclusions = list(exclusions)
        text = f"{_LIGHT_TEXT[env.light]}, {wet_text}"
        if env.fog:
            text += ", including fog"
        else:
            exclusions.append("no fog")
        if exclusions:
            text += ", but " + ", ".join(exclusions)
        return text

    def explain_odd(self, odd: OddDescriptor) -> List[ExplainLine]:
        codes = self.canonical_fields(odd, "unicode")
        if odd.countries.is_any:
            countries = "any country"
        else:
            countries = ", ".join(country_label(c) for c in odd.countries.sorted_codes())
        if odd.road_types.is_any:
            roads = "any type of road"
        else:
            roads = "; ".join(ROAD_TEXT[t] for t in odd.road_types.tokens())
        if odd.velocity is VelocityClass.UNLIMITED:
            velocity = "no limit"
        else:
            velocity = f"< {velocity_bound_kmh(odd.velocity)} km/h"
        extras = ", ".join(sorted(odd.tags)) if odd.tags else "None"
        return [
            ExplainLine("Country code", codes[0], countries),
            ExplainLine("Road users", codes[1], USER_TEXT[odd.road_users]),
            ExplainLine("Road types", codes[2], roads),
            ExplainLine("Environmental conditions", codes[3], self.explain_env(odd.environment)),
            ExplainLine("Velocity", codes[4], velocity),
            ExplainLine("Additional requirements", codes[5], extras),
        ]

    def explain(self, record: TaxonomyRecord) -> List[ExplainLine]:
        lines = [ExplainLine("SAE level", str(int(record.sae)), record.sae.description)]
        lines.extend(self.explain_odd(record.odd))
        if record.adrl is not None:
            lines.append(ExplainLine("ADRL", record.adrl.token, adrl_description(record.adrl).adrl_text))
        return lines


# Instancia global del servicio de parseo
parser_service = ParserService()
