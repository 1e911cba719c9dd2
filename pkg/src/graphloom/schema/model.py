"""Declarative classification schema: categories, gates, modules, indicators.

A schema is an ordered list of categories. Each category owns a set of gate
values (entity-type ids that trigger membership), a list of core properties,
and a named map of modules. A module is either intrinsic (its value
properties become node attributes) or relational (entity-valued properties
become typed edges), and is activated by indicators: (property, value-set)
conditions where an empty value set means presence-based matching.

All schema values are immutable after construction; classification workers
share them freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

# Properties that carry type assertions (instance-of / subclass-of).
TYPE_ASSERTION_PROPERTIES = ("P31", "P279")

INTRINSIC = "intrinsic"
RELATIONAL = "relational"
MODULE_KINDS = (INTRINSIC, RELATIONAL)


class SchemaError(Exception):
    """Structural problem in a schema file or diff."""


@dataclass(frozen=True)
class Indicator:
    """Activation condition: presence-based when ``values`` is empty."""

    property: str
    values: tuple[str, ...] = ()

    @property
    def presence_based(self) -> bool:
        return not self.values

    def value_set(self) -> frozenset[str]:
        return frozenset(self.values)


@dataclass(frozen=True)
class ModuleDef:
    name: str
    kind: str
    indicators: tuple[Indicator, ...]
    value_props: tuple[str, ...]

    def __post_init__(self):
        if self.kind not in MODULE_KINDS:
            raise SchemaError(f"module {self.name}: unknown kind {self.kind!r}")
        if not self.indicators:
            raise SchemaError(f"module {self.name}: indicators must be non-empty")
        if not self.value_props:
            raise SchemaError(f"module {self.name}: value_props must be non-empty")


@dataclass(frozen=True)
class CategoryDef:
    id: str
    gate_values: tuple[str, ...]
    core_properties: tuple[str, ...]
    modules: tuple[ModuleDef, ...]

    def __post_init__(self):
        if not self.gate_values:
            raise SchemaError(f"category {self.id}: gate_values must be non-empty")
        names = [m.name for m in self.modules]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"category {self.id}: duplicate module names {dupes}")

    def gate_set(self) -> frozenset[str]:
        return frozenset(self.gate_values)

    def module(self, name: str) -> ModuleDef | None:
        for m in self.modules:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class SchemaConfig:
    """Ordered categories (order = matching priority) plus a version string.

    ``annotations`` carries the inline ``# label`` comments found next to
    identifiers in the schema files. They are kept for serialization and
    verified against the label store by the validator; they are never used
    for matching.
    """

    categories: tuple[CategoryDef, ...]
    version: str = "0"
    annotations: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        ids = [c.id for c in self.categories]
        if len(ids) != len(set(ids)):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise SchemaError(f"duplicate category ids {dupes}")

    def category(self, cat_id: str) -> CategoryDef | None:
        for c in self.categories:
            if c.id == cat_id:
                return c
        return None

    def category_ids(self) -> list[str]:
        return [c.id for c in self.categories]

    def with_category(self, cat: CategoryDef) -> "SchemaConfig":
        """Return a new schema with ``cat`` replacing the same-id category."""
        cats = tuple(cat if c.id == cat.id else c for c in self.categories)
        return replace(self, categories=cats)


@dataclass(frozen=True)
class GateAddition:
    category: str
    type_id: str
    # Module the gate routes to for gate-module synchronization; None lets
    # apply_diff pick one (existing value-based type-assertion indicator
    # first, declaration order as the final tie-break).
    module: str | None = None


@dataclass(frozen=True)
class IndicatorEdit:
    category: str
    module: str
    property: str
    added_values: tuple[str, ...]


@dataclass(frozen=True)
class ModuleEdit:
    """Create or delete one module definition; merges and splits are
    expressed as delete+create sequences."""

    action: str  # "create" | "delete"
    category: str
    module: ModuleDef | None = None  # for create
    module_name: str | None = None  # for delete

    def name(self) -> str:
        return self.module.name if self.module is not None else str(self.module_name)


@dataclass(frozen=True)
class SchemaDiff:
    added_gates: tuple[GateAddition, ...] = ()
    indicator_edits: tuple[IndicatorEdit, ...] = ()
    module_edits: tuple[ModuleEdit, ...] = ()

    def is_empty(self) -> bool:
        return not (self.added_gates or self.indicator_edits or self.module_edits)
