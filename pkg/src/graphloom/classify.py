"""Gate-based category assignment, indicator module matching, four-bucket
claim routing, and sentence rendering.

Categories are scanned in priority order and the first gate match wins, so
classified entities always land in exactly one category. Claims route with
precedence core > intrinsic > relational > unclaimed; a claim appears in
exactly one bucket. Relational buckets hold entity-valued claims only:
non-entity values under a relational module's value properties fall through
to unclaimed.

Classified output is one Parquet file per shard with a fixed 13-column
layout (documented in the README) plus an aggregated stats report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import polars as pl

from .ingest import (
    ENTITY_REF,
    ClaimValue,
    EntityRecord,
    resolve_description,
    resolve_label,
    stream_shard,
)
from .schema.model import (
    INTRINSIC,
    RELATIONAL,
    CategoryDef,
    ModuleDef,
    SchemaConfig,
)

BUCKET_CORE = "core"
BUCKET_INTRINSIC = "intrinsic"
BUCKET_RELATIONAL = "relational"
BUCKET_UNCLAIMED = "unclaimed"

OUTPUT_COLUMNS = [
    "id",
    "label",
    "description",
    "category",
    "intrinsic_modules",
    "relational_modules",
    "core_claims",
    "intrinsic_claims",
    "relational_claims",
    "unclaimed_claims",
    "sentences",
    "resolution_misses",
    "shard_index",
]


# ---------------------------------------------------------------------------
# matching

class _CompiledModule:
    __slots__ = ("name", "kind", "presence_props", "value_conditions", "value_props")

    def __init__(self, mod: ModuleDef):
        self.name = mod.name
        self.kind = mod.kind
        self.presence_props = frozenset(
            i.property for i in mod.indicators if not i.values
        )
        self.value_conditions = tuple(
            (i.property, frozenset(i.values)) for i in mod.indicators if i.values
        )
        self.value_props = tuple(mod.value_props)

    def matches(self, claims: dict[str, tuple[ClaimValue, ...]]) -> bool:
        for prop in self.presence_props:
            if claims.get(prop):
                return True
        for prop, wanted in self.value_conditions:
            for cv in claims.get(prop, ()):
                # only entity-valued claims participate in value intersection
                if cv.datatype == ENTITY_REF and cv.payload in wanted:
                    return True
        return False


class CompiledSchema:
    """Match-optimized view of an immutable SchemaConfig."""

    def __init__(self, schema: SchemaConfig):
        self.schema = schema
        self.order = [c.id for c in schema.categories]
        self.gates = [(c.id, c.gate_set()) for c in schema.categories]
        self.modules = {
            c.id: tuple(_CompiledModule(m) for m in c.modules)
            for c in schema.categories
        }
        self.core_props = {c.id: frozenset(c.core_properties) for c in schema.categories}


def match_category(entity: EntityRecord, schema: SchemaConfig | CompiledSchema) -> str | None:
    """First category (priority order) whose gates intersect the entity's
    type assertions; None when no gate matches."""
    compiled = schema if isinstance(schema, CompiledSchema) else CompiledSchema(schema)
    types = entity.type_values()
    if not types:
        return None
    for cat_id, gates in compiled.gates:
        if types & gates:
            return cat_id
    return None


def match_modules(entity: EntityRecord, category: CategoryDef) -> set[str]:
    """Names of modules whose indicator disjunction fires on the entity."""
    return {
        m.name
        for m in (_CompiledModule(mod) for mod in category.modules)
        if m.matches(entity.claims)
    }


# ---------------------------------------------------------------------------
# routing

@dataclass(frozen=True)
class RoutedClaim:
    property: str
    property_label: str
    value: object
    value_label: str
    datatype: str
    module: str | None
    qualifiers: tuple[tuple[str, str, object, str], ...] = ()
    # qualifier tuple: (property, property_label, value, value_label)

    def as_dict(self) -> dict:
        return {
            "property": self.property,
            "property_label": self.property_label,
            "value": self.value,
            "value_label": self.value_label,
            "datatype": self.datatype,
            "module": self.module,
            "qualifiers": [
                {
                    "property": q[0],
                    "property_label": q[1],
                    "value": q[2],
                    "value_label": q[3],
                }
                for q in self.qualifiers
            ],
        }


class _Resolver:
    """Label resolution with a miss counter; raw ids are kept on a miss."""

    def __init__(self, labels):
        self.labels = labels
        self.misses = 0

    def resolve(self, ident: str) -> str:
        if self.labels is not None:
            label = self.labels.get(ident)
            if label is not None:
                return label
        self.misses += 1
        return ident

    def value_label(self, cv: ClaimValue) -> str:
        if cv.datatype == ENTITY_REF:
            return self.resolve(cv.payload)
        if cv.datatype == "time":
            text = str(cv.payload).lstrip("+")
            return text.split("T")[0] if "T" in text else text
        if cv.datatype == "quantity":
            return str(cv.payload).lstrip("+")
        if cv.datatype == "coordinate" and isinstance(cv.payload, tuple):
            return f"{cv.payload[0]}, {cv.payload[1]}"
        return str(cv.payload)


def _route_value(
    prop: str,
    cv: ClaimValue,
    core_props: frozenset[str],
    intrinsic_owners: dict[str, str],
    relational_owners: dict[str, str],
) -> tuple[str, str | None]:
    """Bucket + owning module for one claim value."""
    if prop in core_props:
        return BUCKET_CORE, None
    if prop in intrinsic_owners:
        return BUCKET_INTRINSIC, intrinsic_owners[prop]
    if prop in relational_owners and cv.datatype == ENTITY_REF:
        return BUCKET_RELATIONAL, relational_owners[prop]
    return BUCKET_UNCLAIMED, None


def _owner_maps(category: CategoryDef, active: set[str]):
    """Property -> owning module, first active module in declaration order,
    one map per kind."""
    intrinsic: dict[str, str] = {}
    relational: dict[str, str] = {}
    for mod in category.modules:
        if mod.name not in active:
            continue
        target = intrinsic if mod.kind == INTRINSIC else relational
        for p in mod.value_props:
            target.setdefault(p, mod.name)
    return intrinsic, relational


def route_claims(
    entity: EntityRecord,
    category: CategoryDef,
    active: set[str],
    labels=None,
    resolver: _Resolver | None = None,
) -> dict[str, list[RoutedClaim]]:
    """Route every claim of the entity into exactly one bucket."""
    res = resolver or _Resolver(labels)
    intrinsic_owners, relational_owners = _owner_maps(category, active)
    core_props = frozenset(category.core_properties)
    buckets: dict[str, list[RoutedClaim]] = {
        BUCKET_CORE: [],
        BUCKET_INTRINSIC: [],
        BUCKET_RELATIONAL: [],
        BUCKET_UNCLAIMED: [],
    }
    for prop, values in entity.claims.items():
        prop_label = res.resolve(prop)
        for cv in values:
            bucket, owner = _route_value(
                prop, cv, core_props, intrinsic_owners, relational_owners
            )
            quals = tuple(
                (qp, res.resolve(qp), qv.payload, res.value_label(qv))
                for qp, qvals in cv.qualifiers
                for qv in qvals
            )
            buckets[bucket].append(
                RoutedClaim(
                    property=prop,
                    property_label=prop_label,
                    value=cv.payload,
                    value_label=res.value_label(cv),
                    datatype=cv.datatype,
                    module=owner,
                    qualifiers=quals,
                )
            )
    return buckets


def render_sentence(claim: RoutedClaim, subject_label: str) -> str:
    """Deterministic template; qualifiers joined inside one parenthetical."""
    base = f"{subject_label}'s {claim.property_label} is {claim.value_label}"
    if claim.qualifiers:
        inner = "; ".join(f"{q[1]}: {q[3]}" for q in claim.qualifiers)
        return f"{base} ({inner})."
    return f"{base}."


# ---------------------------------------------------------------------------
# stats

@dataclass
class ClassStats:
    total: int = 0
    classified: int = 0
    per_category: dict[str, int] = field(default_factory=dict)
    per_category_module: dict[str, dict[str, int]] = field(default_factory=dict)
    unclassified_type_counts: dict[str, int] = field(default_factory=dict)
    unclassified_ids: list[str] = field(default_factory=list)
    no_module_ids: list[str] = field(default_factory=list)
    resolution_misses: int = 0
    skipped_lines: int = 0

    @property
    def empty_input(self) -> bool:
        return self.total == 0

    @property
    def r_c(self) -> float:
        if self.total == 0:
            return 1.0
        return 1.0 - len(self.unclassified_ids) / self.total

    @property
    def r_m(self) -> float:
        n_c = self.classified
        if n_c == 0:
            return 0.0
        return 1.0 - len(self.no_module_ids) / n_c

    def merge(self, other: "ClassStats") -> None:
        self.total += other.total
        self.classified += other.classified
        self.resolution_misses += other.resolution_misses
        self.skipped_lines += other.skipped_lines
        self.unclassified_ids.extend(other.unclassified_ids)
        self.no_module_ids.extend(other.no_module_ids)
        for cat, n in other.per_category.items():
            self.per_category[cat] = self.per_category.get(cat, 0) + n
        for cat, mods in other.per_category_module.items():
            mine = self.per_category_module.setdefault(cat, {})
            for mod, n in mods.items():
                mine[mod] = mine.get(mod, 0) + n
        for t, n in other.unclassified_type_counts.items():
            self.unclassified_type_counts[t] = (
                self.unclassified_type_counts.get(t, 0) + n
            )

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "classified": self.classified,
            "r_c": self.r_c,
            "r_m": self.r_m,
            "empty_input": self.empty_input,
            "per_category": dict(sorted(self.per_category.items())),
            "per_category_module": {
                c: dict(sorted(m.items()))
                for c, m in sorted(self.per_category_module.items())
            },
            "unclassified_type_counts": dict(
                sorted(
                    self.unclassified_type_counts.items(),
                    key=lambda kv: (-kv[1], kv[0]),
                )
            ),
            "unclassified_count": len(self.unclassified_ids),
            "no_module_count": len(self.no_module_ids),
            "no_module_ids": sorted(self.no_module_ids),
            "unclassified_ids": sorted(self.unclassified_ids),
            "resolution_misses": self.resolution_misses,
            "skipped_lines": self.skipped_lines,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ClassStats":
        stats = cls(
            total=doc["total"],
            classified=doc["classified"],
            per_category=dict(doc.get("per_category", {})),
            per_category_module={
                c: dict(m) for c, m in doc.get("per_category_module", {}).items()
            },
            unclassified_type_counts=dict(doc.get("unclassified_type_counts", {})),
            unclassified_ids=list(doc.get("unclassified_ids", [])),
            no_module_ids=list(doc.get("no_module_ids", [])),
            resolution_misses=doc.get("resolution_misses", 0),
            skipped_lines=doc.get("skipped_lines", 0),
        )
        return stats


# ---------------------------------------------------------------------------
# per-entity classification and the shard driver

def classify_entity(
    entity: EntityRecord,
    compiled: SchemaConfig | CompiledSchema,
    labels=None,
) -> dict:
    """One output row (13-column layout) for one entity."""
    if not isinstance(compiled, CompiledSchema):
        compiled = CompiledSchema(compiled)
    resolver = _Resolver(labels)
    category_id = match_category(entity, compiled)
    label = resolve_label(entity) or entity.id
    description = resolve_description(entity) or ""

    intrinsic_mods: list[str] = []
    relational_mods: list[str] = []
    buckets: dict[str, list[RoutedClaim]] = {
        BUCKET_CORE: [],
        BUCKET_INTRINSIC: [],
        BUCKET_RELATIONAL: [],
        BUCKET_UNCLAIMED: [],
    }
    sentences: list[str] = []

    if category_id is not None:
        category = compiled.schema.category(category_id)
        active_names = {
            m.name for m in compiled.modules[category_id] if m.matches(entity.claims)
        }
        intrinsic_mods = [
            m.name for m in category.modules
            if m.name in active_names and m.kind == INTRINSIC
        ]
        relational_mods = [
            m.name for m in category.modules
            if m.name in active_names and m.kind == RELATIONAL
        ]
        buckets = route_claims(entity, category, active_names, resolver=resolver)
        for bucket in (BUCKET_CORE, BUCKET_INTRINSIC, BUCKET_RELATIONAL):
            for claim in buckets[bucket]:
                sentences.append(render_sentence(claim, label))
    else:
        # everything an unclassified entity carries stays unclaimed
        for prop, values in entity.claims.items():
            prop_label = resolver.resolve(prop)
            for cv in values:
                buckets[BUCKET_UNCLAIMED].append(
                    RoutedClaim(
                        property=prop,
                        property_label=prop_label,
                        value=cv.payload,
                        value_label=resolver.value_label(cv),
                        datatype=cv.datatype,
                        module=None,
                    )
                )

    return {
        "id": entity.id,
        "label": label,
        "description": description,
        "category": category_id,
        "intrinsic_modules": intrinsic_mods,
        "relational_modules": relational_mods,
        "core_claims": json.dumps([c.as_dict() for c in buckets[BUCKET_CORE]]),
        "intrinsic_claims": json.dumps([c.as_dict() for c in buckets[BUCKET_INTRINSIC]]),
        "relational_claims": json.dumps(
            [c.as_dict() for c in buckets[BUCKET_RELATIONAL]]
        ),
        "unclaimed_claims": json.dumps([c.as_dict() for c in buckets[BUCKET_UNCLAIMED]]),
        "sentences": sentences,
        "resolution_misses": resolver.misses,
        "shard_index": 0,
    }


_ROW_SCHEMA = {
    "id": pl.Utf8,
    "label": pl.Utf8,
    "description": pl.Utf8,
    "category": pl.Utf8,
    "intrinsic_modules": pl.List(pl.Utf8),
    "relational_modules": pl.List(pl.Utf8),
    "core_claims": pl.Utf8,
    "intrinsic_claims": pl.Utf8,
    "relational_claims": pl.Utf8,
    "unclaimed_claims": pl.Utf8,
    "sentences": pl.List(pl.Utf8),
    "resolution_misses": pl.Int64,
    "shard_index": pl.Int64,
}


def classify_shards(
    shards: Iterable,
    core_ids: set[str] | None,
    schema: SchemaConfig,
    labels=None,
    out_dir=None,
) -> tuple[list[Path], ClassStats]:
    """Classify every core entity, one Parquet file per shard, plus merged
    stats. Output content is deterministic for fixed inputs."""
    compiled = CompiledSchema(schema)
    out_dir = Path(out_dir) if out_dir is not None else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    stats = ClassStats()
    outputs: list[Path] = []

    for shard_index, shard in enumerate(sorted(Path(s) for s in shards)):
        rows: list[dict] = []
        reader = stream_shard(shard)
        for entity in reader:
            if core_ids is not None and entity.id not in core_ids:
                continue
            row = classify_entity(entity, compiled, labels)
            row["shard_index"] = shard_index
            rows.append(row)

            stats.total += 1
            stats.resolution_misses += row["resolution_misses"]
            cat = row["category"]
            if cat is None:
                stats.unclassified_ids.append(entity.id)
                for t in sorted(entity.type_values()):
                    stats.unclassified_type_counts[t] = (
                        stats.unclassified_type_counts.get(t, 0) + 1
                    )
            else:
                stats.classified += 1
                stats.per_category[cat] = stats.per_category.get(cat, 0) + 1
                mods = row["intrinsic_modules"] + row["relational_modules"]
                if not mods:
                    stats.no_module_ids.append(entity.id)
                per_mod = stats.per_category_module.setdefault(cat, {})
                for mod in mods:
                    per_mod[mod] = per_mod.get(mod, 0) + 1
        stats.skipped_lines += reader.skipped

        if out_dir is not None:
            frame = pl.DataFrame(rows, schema=_ROW_SCHEMA)
            path = out_dir / f"classified-{shard_index:04d}.parquet"
            frame.write_parquet(path)
            outputs.append(path)

    if out_dir is not None:
        (out_dir / "class-stats.json").write_text(
            json.dumps(stats.as_dict(), indent=2), encoding="utf-8"
        )
    return outputs, stats


def read_classified(out_dir) -> pl.DataFrame:
    paths = sorted(Path(out_dir).glob("classified-*.parquet"))
    if not paths:
        return pl.DataFrame(schema=_ROW_SCHEMA)
    return pl.concat([pl.read_parquet(p) for p in paths])


def read_stats(out_dir) -> ClassStats:
    doc = json.loads((Path(out_dir) / "class-stats.json").read_text(encoding="utf-8"))
    return ClassStats.from_dict(doc)
