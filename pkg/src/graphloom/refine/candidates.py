"""Candidate type selection for gate expansion.

Two criteria drive selection, mirroring the refinement loop's inputs:
frequency (types with the most unclassified instances, maximizing coverage
gain) and connectivity (types of unclassified entities heavily referenced by
classified entities' relational claims, maximizing graph connectivity even
when instance counts are low). Ties break by (count desc, type id asc).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import polars as pl

from ..classify import read_classified


@dataclass
class CandidateType:
    type_id: str
    label: str | None = None
    unclassified_count: int = 0
    inbound_reference_count: int = 0
    samples: list[tuple[str, str, str]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "type_id": self.type_id,
            "label": self.label,
            "unclassified_count": self.unclassified_count,
            "inbound_reference_count": self.inbound_reference_count,
            "samples": [list(s) for s in self.samples],
        }


def _entity_types(row) -> list[str]:
    """P31 types of an output row, recovered from its claim buckets."""
    types = []
    for column in ("core_claims", "intrinsic_claims", "relational_claims", "unclaimed_claims"):
        for claim in json.loads(row[column]):
            if claim["property"] == "P31" and claim["datatype"] == "entity-ref":
                types.append(claim["value"])
    return types


def candidate_types(
    classified_dir,
    k_freq: int = 20,
    k_hub: int = 20,
    labels=None,
    max_samples: int = 5,
) -> list[CandidateType]:
    frame = read_classified(classified_dir)
    if frame.is_empty():
        return []

    unclassified = frame.filter(pl.col("category").is_null())
    if unclassified.is_empty():
        return []
    classified = frame.filter(pl.col("category").is_not_null())

    # frequency criterion + per-type samples
    freq: dict[str, int] = {}
    type_samples: dict[str, list[tuple[str, str, str]]] = {}
    unclassified_types: dict[str, list[str]] = {}
    for row in unclassified.iter_rows(named=True):
        types = _entity_types(row)
        unclassified_types[row["id"]] = types
        for t in types:
            freq[t] = freq.get(t, 0) + 1
            bucket = type_samples.setdefault(t, [])
            if len(bucket) < max_samples:
                bucket.append((row["id"], row["label"], row["description"]))

    # connectivity criterion: references from classified relational claims
    # into unclassified entities, grouped by the target's types
    inbound: dict[str, int] = {}
    unclassified_ids = set(unclassified_types)
    for row in classified.iter_rows(named=True):
        for claim in json.loads(row["relational_claims"]):
            target = claim["value"]
            if target in unclassified_ids:
                for t in unclassified_types[target]:
                    inbound[t] = inbound.get(t, 0) + 1

    top_freq = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))[:k_freq]
    top_hub = sorted(inbound.items(), key=lambda kv: (-kv[1], kv[0]))[:k_hub]

    out: dict[str, CandidateType] = {}
    for type_id, count in top_freq:
        out.setdefault(type_id, CandidateType(type_id)).unclassified_count = count
    for type_id, count in top_hub:
        cand = out.setdefault(type_id, CandidateType(type_id))
        cand.inbound_reference_count = count
        cand.unclassified_count = freq.get(type_id, 0)

    for cand in out.values():
        cand.samples = type_samples.get(cand.type_id, [])
        if labels is not None:
            cand.label = labels.get(cand.type_id)

    return sorted(
        out.values(),
        key=lambda c: (
            -max(c.unclassified_count, c.inbound_reference_count),
            c.type_id,
        ),
    )
