from app.taxonomy.diagnostics import Diagnostic, ParseResult, Severity
from app.taxonomy.lattice import (
    NoOverlap,
    dimension_compare,
    odd_compare,
    odd_join,
    odd_meet,
)
from app.taxonomy.model import (
    AdrlLevel,
    CountryScope,
    EnvScope,
    Light,
    OddDescriptor,
    Relation,
    RoadTypeSet,
    RoadUserScope,
    SaeLevel,
    SourceSpan,
    TaxonomyRecord,
    VelocityClass,
    Wetness,
    odd_top,
    velocity_bound_kmh,
)
from app.taxonomy.readiness import adrl_description, simulation_sufficient

__all__ = [
    "AdrlLevel",
    "CountryScope",
    "Diagnostic",
    "EnvScope",
    "Light",
    "NoOverlap",
    "OddDescriptor",
    "ParseResult",
    "Relation",
    "RoadTypeSet",
    "RoadUserScope",
    "SaeLevel",
    "Severity",
    "SourceSpan",
    "TaxonomyRecord",
    "VelocityClass",
    "Wetness",
    "adrl_description",
    "dimension_compare",
    "odd_compare",
    "odd_join",
    "odd_meet",
    "odd_top",
    "simulation_sufficient",
    "velocity_bound_kmh",
]
