"""Priority-ordered cleaning cascade separating core entities from
infrastructure and bulk imports.

Tier order is fixed: structural type match, source-signature match,
ratio-based safety net, default-core. The weighted curation score protects
entities with rich editorial signals: it overrides bulk-import matches
(structural or signature) but never infrastructure matches. All rule lists
live in an editable YAML file; the shipped defaults reconstruct the
published examples and are data, not code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

import yaml

from .ingest import ENTITY_REF, EntityRecord, stream_shard

HUMAN_TYPE = "Q5"

CORE = "core"
NON_CORE = "non-core"

TIER_STRUCTURAL = "structural"
TIER_SIGNATURE = "signature"
TIER_RATIO = "ratio-net"
TIER_DEFAULT = "default-core"


@dataclass(frozen=True)
class SourceSignature:
    name: str
    required_properties: tuple[str, ...]


@dataclass(frozen=True)
class CleaningRules:
    infrastructure_types: frozenset[str]
    bulk_import_types: frozenset[str]
    source_signatures: tuple[SourceSignature, ...]
    curation_weights: dict[str, int]
    people_curation_weights: dict[str, int]
    score_threshold: int = 3
    bulk_ratio_threshold: float = 0.70
    bulk_marker_properties: frozenset[str] = frozenset()

    def __post_init__(self):
        if not 0 <= self.bulk_ratio_threshold <= 1:
            raise ValueError("bulk_ratio_threshold must be in [0, 1]")
        if self.score_threshold < 0:
            raise ValueError("score_threshold must be >= 0")
        for prop in self.curation_weights.keys() & self.people_curation_weights.keys():
            if self.curation_weights[prop] != self.people_curation_weights[prop]:
                raise ValueError(
                    f"{prop} carries different weights in the general and "
                    "people-specific tables"
                )


@dataclass(frozen=True)
class CleaningVerdict:
    decision: str
    tier: str
    matched_rule: str
    curation_score: int


@dataclass
class CleaningStats:
    total: int = 0
    core: int = 0
    per_tier: dict[str, int] = field(default_factory=dict)
    protected: int = 0
    skipped_lines: int = 0

    def merge(self, other: "CleaningStats") -> None:
        self.total += other.total
        self.core += other.core
        self.protected += other.protected
        self.skipped_lines += other.skipped_lines
        for tier, n in other.per_tier.items():
            self.per_tier[tier] = self.per_tier.get(tier, 0) + n

    def as_lines(self) -> list[str]:
        lines = [f"total\t{self.total}", f"core\t{self.core}"]
        lines += [f"tier:{t}\t{n}" for t, n in sorted(self.per_tier.items())]
        lines += [f"protected\t{self.protected}", f"skipped_lines\t{self.skipped_lines}"]
        return lines


def load_rules(path=None) -> CleaningRules:
    """Load cleaning rules; with no path, the packaged defaults are used."""
    if path is None:
        text = (
            resources.files("graphloom") / "rules" / "cleaning.yaml"
        ).read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    doc = yaml.safe_load(text)
    return CleaningRules(
        infrastructure_types=frozenset(doc.get("infrastructure_types") or []),
        bulk_import_types=frozenset(doc.get("bulk_import_types") or []),
        source_signatures=tuple(
            SourceSignature(s["name"], tuple(s["required_properties"]))
            for s in doc.get("source_signatures") or []
        ),
        curation_weights={
            str(k): int(v) for k, v in (doc.get("curation_weights") or {}).items()
        },
        people_curation_weights={
            str(k): int(v)
            for k, v in (doc.get("people_curation_weights") or {}).items()
        },
        score_threshold=int(doc.get("score_threshold", 3)),
        bulk_ratio_threshold=float(doc.get("bulk_ratio_threshold", 0.70)),
        bulk_marker_properties=frozenset(doc.get("bulk_marker_properties") or []),
    )


def _instance_types(entity: EntityRecord) -> set[str]:
    return {
        cv.payload
        for cv in entity.claims.get("P31", ())
        if cv.datatype == ENTITY_REF
    }


def curation_score(entity: EntityRecord, rules: CleaningRules) -> int:
    """Weighted sum of editorial-signal properties present on the entity.

    Presence counts once per property regardless of value count. The
    people-specific tiers only apply to instance-of human entities.
    """
    props = entity.claims.keys()
    score = sum(w for p, w in rules.curation_weights.items() if p in props)
    if HUMAN_TYPE in _instance_types(entity):
        score += sum(
            w for p, w in rules.people_curation_weights.items() if p in props
        )
    return score


def clean_entity(entity: EntityRecord, rules: CleaningRules) -> CleaningVerdict:
    types = _instance_types(entity)
    score = curation_score(entity, rules)

    infra = sorted(types & rules.infrastructure_types)
    if infra:
        # infrastructure is never protected by the curation score
        return CleaningVerdict(NON_CORE, TIER_STRUCTURAL, infra[0], score)

    bulk = sorted(types & rules.bulk_import_types)
    if bulk:
        if score >= rules.score_threshold:
            return CleaningVerdict(CORE, TIER_DEFAULT, "curation-protected", score)
        return CleaningVerdict(NON_CORE, TIER_STRUCTURAL, bulk[0], score)

    props = set(entity.claims.keys())
    for sig in rules.source_signatures:
        if set(sig.required_properties) <= props:
            if score >= rules.score_threshold:
                return CleaningVerdict(CORE, TIER_DEFAULT, "curation-protected", score)
            return CleaningVerdict(NON_CORE, TIER_SIGNATURE, sig.name, score)

    if props and score < rules.score_threshold:
        # denominator: distinct property ids, stable under duplicate claims
        markers = len(props & rules.bulk_marker_properties)
        if markers / len(props) >= rules.bulk_ratio_threshold:
            return CleaningVerdict(NON_CORE, TIER_RATIO, "bulk-marker-ratio", score)

    return CleaningVerdict(CORE, TIER_DEFAULT, "default", score)


def clean_shards(
    shards: Iterable, rules: CleaningRules, out_path=None
) -> tuple[set[str], CleaningStats]:
    """Run the cascade over every entity; optionally persist the sorted
    core-id set (one id per line) for exact diffing downstream."""
    stats = CleaningStats()
    core_ids: set[str] = set()
    for shard in shards:
        reader = stream_shard(shard)
        for entity in reader:
            verdict = clean_entity(entity, rules)
            stats.total += 1
            stats.per_tier[verdict.tier] = stats.per_tier.get(verdict.tier, 0) + 1
            if verdict.decision == CORE:
                stats.core += 1
                core_ids.add(entity.id)
                if verdict.matched_rule == "curation-protected":
                    stats.protected += 1
        stats.skipped_lines += reader.skipped
    if out_path is not None:
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(
            "".join(f"{i}\n" for i in sorted(core_ids)), encoding="utf-8"
        )
    return core_ids, stats


def load_core_ids(path) -> set[str]:
    return {
        line.strip()
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    }
