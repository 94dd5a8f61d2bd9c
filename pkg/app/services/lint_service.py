from dataclasses import dataclass
from typing import Iterable, List, Optional, Type

import structlog

from app.exceptions import UnknownRuleIdError
from app.taxonomy.diagnostics import Diagnostic, Severity
from app.taxonomy.iso3166 import ISO3166_SNAPSHOT, is_known_code
from app.taxonomy.model import RoadUserScope, SaeLevel, TaxonomyRecord, VelocityClass

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class RuleInfo:
    rule_id: str
    title: str
    severity: Severity
    rationale: str
    enabled_by_default: bool = True

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "title": self.title,
            "severity": self.severity.value,
            "rationale": self.rationale,
            "enabled_by_default": self.enabled_by_default,
        }


class LintRule:
    """Clase base de las reglas de consistencia entre campos"""
    rule_id = ""
    title = ""
    severity = Severity.WARNING
    rationale = ""
    # Las reglas opcionales solo se aplican si se piden por identificador
    enabled_by_default = True

    def check(self, record: TaxonomyRecord) -> List[Diagnostic]:
        raise NotImplementedError

    def diagnostic(self, message: str, span=None) -> Diagnostic:
        return Diagnostic(self.rule_id, self.severity, message, span)

    @classmethod
    def info(cls) -> RuleInfo:
        return RuleInfo(cls.rule_id, cls.title, cls.severity, cls.rationale, cls.enabled_by_default)


class UnlimitedOddAtLevel5Rule(LintRule):
    rule_id = "R001"
    title = "Level 5 requires an unlimited ODD"
    severity = Severity.ERROR
    rationale = 'Only at Level 5 an "unlimited" ODD can be assumed; every category must be ★ and no additional requirement may be listed.'

    def check(self, record):
        if record.sae is not SaeLevel.LEVEL_5 or record.odd.is_top():
            return []
        return [self.diagnostic(
            "Un sistema de nivel 5 debe tener un ODD ilimitado (todas las categorías en ★, sin requisitos)",
            record.span_of(self.first_restricted_field(record)),
        )]

    @staticmethod
    def first_restricted_field(record: TaxonomyRecord) -> str:
        odd = record.odd
        restricted = (
            ("countries", not odd.countries.is_any),
            ("users", odd.road_users is not RoadUserScope.ANY),
            ("roads", not odd.road_types.is_any),
            ("env", not odd.environment.is_top),
            ("velocity", odd.velocity is not VelocityClass.UNLIMITED),
            ("extras", bool(odd.additional_requirements)),
        )
        return next(name for name, flag in restricted if flag)


class HighwayExtensionAtLevel4Rule(LintRule):
    rule_id = "R002"
    title = "Level 4 highway systems need H+"
    severity = Severity.WARNING
    rationale = (
        'Any level 4 system for road type "H" does not make sense, as at least "H+" is required '
        "to get a sleeping passenger on a safe position at a parking place next to the highway."
    )

    def check(self, record):
        roads = record.odd.road_types
        if record.sae is SaeLevel.LEVEL_4 and roads.h_core and not roads.h_ext:
            return [self.diagnostic(
                "Un sistema de nivel 4 en autopista necesita al menos H+ en lugar de H",
                record.span_of("roads"),
            )]
        return []


class UnknownCountryCodeRule(LintRule):
    rule_id = "R003"
    title = "Country codes follow ISO 3166"
    severity = Severity.WARNING
    rationale = f"Countries are given as standardized country codes according to ISO 3166 (snapshot: {ISO3166_SNAPSHOT})."

    def check(self, record):
        countries = record.odd.countries
        if countries.is_any:
            return []
        return [
            self.diagnostic(f"'{code}' no es un código ISO 3166-1 alfa-2 asignado", record.span_of("countries"))
            for code in countries.sorted_codes()
            if not is_known_code(code)
        ]


class DuplicateTokenRule(LintRule):
    rule_id = "R004"
    title = "No duplicate tokens within a field"
    severity = Severity.WARNING
    rationale = "A token repeated within one field (e.g. \"DE DE\") carries no information and hides typos."

    def check(self, record):
        return [
            self.diagnostic(f"Token '{note.token}' repetido en el campo '{note.field}'", note.span)
            for note in record.notes
            if note.kind == "duplicate"
        ]


class SubstitutedEnvTokenRule(LintRule):
    rule_id = "R005"
    title = "No substituted environmental tokens"
    severity = Severity.WARNING
    rationale = (
        '"N substitutes L", "R substitutes D" and "I substitutes R": listing both tokens is redundant; '
        "the most permissive one is kept."
    )

    def check(self, record):
        return [
            self.diagnostic(f"Token '{note.token}' redundante: se conserva la condición más permisiva", note.span)
            for note in record.notes
            if note.kind == "substituted"
        ]


class Level5ExpectationRule(LintRule):
    rule_id = "R006"
    title = "Level 5 is not expected in the next decades"
    severity = Severity.INFO
    enabled_by_default = False
    rationale = (
        "Level 5 is not expectable in the next decades since it means unlimited driving everywhere, "
        "everytime and under every condition."
    )

    def check(self, record):
        if record.sae is SaeLevel.LEVEL_5:
            return [self.diagnostic("Registro de nivel 5: clasificación poco realista hoy en día", record.span_of("sae"))]
        return []


def get_all_rules() -> List[Type[LintRule]]:
    """Obtiene todas las reglas registradas, ordenadas por identificador"""
    return [
        UnlimitedOddAtLevel5Rule,
        HighwayExtensionAtLevel4Rule,
        UnknownCountryCodeRule,
        DuplicateTokenRule,
        SubstitutedEnvTokenRule,
        Level5ExpectationRule,
    ]


class LintService:
    """Servicio que aplica las reglas de lint a registros ya construidos"""

    def __init__(self, rules: Optional[Iterable[Type[LintRule]]] = None):
        self.rules = [rule() for rule in (rules or get_all_rules())]
        ids = [rule.rule_id for rule in self.rules]
        if len(set(ids)) != len(ids):
            raise ValueError("Identificadores de regla duplicados en el registro")
        self.rules.sort(key=lambda rule: rule.rule_id)

    def list_rules(self) -> List[RuleInfo]:
        return [rule.info() for rule in self.rules]

    def resolve_rules(self, enabled_rules: Optional[Iterable[str]]) -> List[LintRule]:
        if enabled_rules is None:
            return [rule for rule in self.rules if rule.enabled_by_default]
        wanted = {rule_id.strip().upper() for rule_id in enabled_rules if rule_id.strip()}
        unknown = wanted - {rule.rule_id for rule in self.rules}
        if unknown:
            raise UnknownRuleIdError(unknown)
        return [rule for rule in self.rules if rule.rule_id in wanted]

    def run_lints(self, record: TaxonomyRecord, enabled_rules: Optional[Iterable[str]] = None) -> List[Diagnostic]:
        """
        Aplica las reglas habilitadas (por defecto, las que no son opcionales).

        Returns:
            Diagnósticos ordenados por identificador de regla y posición
        """
        diagnostics: List[Diagnostic] = []
        for rule in self.resolve_rules(enabled_rules):
            diagnostics.extend(rule.check(record))
        diagnostics.sort(key=Diagnostic.sort_key)
        if diagnostics:
            logger.debug("lint.findings", count=len(diagnostics), rules=sorted({d.rule_id for d in diagnostics}))
        return diagnostics


# Instancia global del servicio de lint
lint_service = LintService()
