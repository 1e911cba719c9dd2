from .model import (
    INTRINSIC,
    RELATIONAL,
    TYPE_ASSERTION_PROPERTIES,
    CategoryDef,
    GateAddition,
    Indicator,
    IndicatorEdit,
    ModuleDef,
    ModuleEdit,
    SchemaConfig,
    SchemaDiff,
    SchemaError,
)
from .loader import SchemaParseError, load_schema, serialize_schema
from .validator import ValidationReport, Violation, validate_schema
from .diff import DiffError, apply_diff
from .stats import SpanReport, schema_stats
from .prompt import generate_extraction_prompt

__all__ = [
    "INTRINSIC",
    "RELATIONAL",
    "TYPE_ASSERTION_PROPERTIES",
    "CategoryDef",
    "GateAddition",
    "Indicator",
    "IndicatorEdit",
    "ModuleDef",
    "ModuleEdit",
    "SchemaConfig",
    "SchemaDiff",
    "SchemaError",
    "SchemaParseError",
    "load_schema",
    "serialize_schema",
    "ValidationReport",
    "Violation",
    "validate_schema",
    "DiffError",
    "apply_diff",
    "SpanReport",
    "schema_stats",
    "generate_extraction_prompt",
]
