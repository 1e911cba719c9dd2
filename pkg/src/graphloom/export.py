"""Three-pass graph export and derived artifacts.

Pass 1 writes one node CSV per category (core-property and intrinsic
attribute columns), pass 2 one edge CSV per relational module (restricted
to a module filter when given), pass 3 a stub file covering exactly the
edge targets outside the core set. A manifest records row counts and
checksums. Row order is deterministic: nodes by id, edges by
(source, property, target).
"""

from __future__ import annotations

import csv
import hashlib
import json
from collections import Counter
from pathlib import Path

from .classify import read_classified
from .schema.model import INTRINSIC, RELATIONAL, SchemaConfig

MULTI_VALUE_DELIMITER = "|"
DEFAULT_QUALIFIER_COLUMNS = 3
DEFAULT_PROFILE_PROPERTIES = ("P106", "P413")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _claim_cells(claims: list[dict], props: list[str]) -> dict[str, str]:
    by_prop: dict[str, list[str]] = {}
    for claim in claims:
        by_prop.setdefault(claim["property"], []).append(str(claim["value_label"]))
    return {p: MULTI_VALUE_DELIMITER.join(by_prop.get(p, [])) for p in props}


def export_graph(
    classified_dir,
    core_ids: set[str] | None,
    schema: SchemaConfig,
    labels=None,
    out_dir=None,
    module_filter: set[str] | None = None,
    qualifier_columns: int = DEFAULT_QUALIFIER_COLUMNS,
) -> Path:
    out_dir = Path(out_dir)
    (out_dir / "nodes").mkdir(parents=True, exist_ok=True)
    (out_dir / "edges").mkdir(parents=True, exist_ok=True)
    frame = read_classified(classified_dir)

    relational_modules = sorted(
        {
            m.name
            for c in schema.categories
            for m in c.modules
            if m.kind == RELATIONAL
        }
    )
    if module_filter is not None:
        relational_modules = [m for m in relational_modules if m in module_filter]

    # gather rows once; fixture-scale data fits in memory, shard-scale runs
    # stream per category below
    rows = sorted(frame.iter_rows(named=True), key=lambda r: r["id"])
    classified_rows = [r for r in rows if r["category"] is not None]
    node_ids = {r["id"] for r in classified_rows}

    # pass 2 happens logically first here so a module filter can restrict
    # the node pass to endpoint categories
    edges_by_module: dict[str, list[tuple]] = {m: [] for m in relational_modules}
    for row in classified_rows:
        for claim in json.loads(row["relational_claims"]):
            module = claim["module"]
            if module not in edges_by_module:
                continue
            edges_by_module[module].append(
                (
                    row["id"],
                    claim["value"],
                    module,
                    claim["property"],
                    tuple(
                        (q["property"], q["property_label"], str(q["value_label"]))
                        for q in claim["qualifiers"]
                    ),
                    row["category"],
                )
            )

    endpoint_categories: set[str] | None = None
    if module_filter is not None:
        endpoint_categories = set()
        by_id_cat = {r["id"]: r["category"] for r in classified_rows}
        for edges in edges_by_module.values():
            for edge in edges:
                endpoint_categories.add(edge[5])
                target_cat = by_id_cat.get(edge[1])
                if target_cat:
                    endpoint_categories.add(target_cat)

    manifest: dict = {"files": {}, "module_filter": sorted(module_filter) if module_filter else None}

    # pass 1: nodes, one file per category
    kept_node_ids: set[str] = set()
    for cat in schema.categories:
        if endpoint_categories is not None and cat.id not in endpoint_categories:
            continue
        intrinsic_props = sorted(
            {
                p
                for m in cat.modules
                if m.kind == INTRINSIC
                for p in m.value_props
            }
        )
        columns = ["id", "label", "description"] + list(cat.core_properties) + intrinsic_props
        path = out_dir / "nodes" / f"{cat.id}.csv"
        count = 0
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in classified_rows:
                if row["category"] != cat.id:
                    continue
                kept_node_ids.add(row["id"])
                core_cells = _claim_cells(
                    json.loads(row["core_claims"]), list(cat.core_properties)
                )
                intr_cells = _claim_cells(
                    json.loads(row["intrinsic_claims"]), intrinsic_props
                )
                writer.writerow(
                    [row["id"], row["label"], row["description"]]
                    + [core_cells[p] for p in cat.core_properties]
                    + [intr_cells[p] for p in intrinsic_props]
                )
                count += 1
        manifest["files"][f"nodes/{cat.id}.csv"] = {
            "rows": count, "sha256": _sha256(path)
        }

    # pass 2: edges, one file per relational module
    stub_targets: set[str] = set()
    for module in relational_modules:
        edges = sorted(edges_by_module[module], key=lambda e: (e[0], e[3], e[1]))
        if endpoint_categories is not None:
            edges = [e for e in edges if e[5] in endpoint_categories]
        qual_freq = Counter(q[0] for e in edges for q in e[4])
        top_quals = [p for p, _ in sorted(qual_freq.items(), key=lambda kv: (-kv[1], kv[0]))[:qualifier_columns]]
        path = out_dir / "edges" / f"{module}.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["source", "target", "relationship", "property"]
                + top_quals
                + ["other_qualifiers"]
            )
            for source, target, mod, prop, quals, _cat in edges:
                cells = {p: [] for p in top_quals}
                packed = []
                for qprop, qlabel, qvalue in quals:
                    if qprop in cells:
                        cells[qprop].append(qvalue)
                    else:
                        packed.append(f"{qlabel}={qvalue}")
                writer.writerow(
                    [source, target, mod, prop]
                    + [MULTI_VALUE_DELIMITER.join(cells[p]) for p in top_quals]
                    + [MULTI_VALUE_DELIMITER.join(packed)]
                )
                if core_ids is not None:
                    if target not in core_ids:
                        stub_targets.add(target)
                elif target not in node_ids:
                    stub_targets.add(target)
        manifest["files"][f"edges/{module}.csv"] = {
            "rows": len(edges), "sha256": _sha256(path)
        }

    # pass 3: stubs, after the full edge target set is known
    stub_path = out_dir / "stubs.csv"
    stub_label_misses = 0
    with open(stub_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label"])
        for target in sorted(stub_targets):
            label = labels.get(target) if labels is not None else None
            if label is None:
                label = target
                stub_label_misses += 1
            writer.writerow([target, label])
    manifest["files"]["stubs.csv"] = {
        "rows": len(stub_targets), "sha256": _sha256(stub_path)
    }
    manifest["stub_label_misses"] = stub_label_misses

    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
    )
    return out_dir


def export_profiles(
    classified_dir,
    schema: SchemaConfig,
    labels=None,
    out_path=None,
    profile_properties=DEFAULT_PROFILE_PROPERTIES,
    category_labels: dict[str, str] | None = None,
) -> list[dict]:
    """One profile per classified entity: category display label, active
    module names, plus value labels of the configured discriminative
    properties. Line-delimited JSON on disk."""
    frame = read_classified(classified_dir)
    wanted = set(profile_properties)
    profiles = []
    for row in sorted(frame.iter_rows(named=True), key=lambda r: r["id"]):
        if row["category"] is None:
            continue
        type_labels = [
            (category_labels or {}).get(row["category"], row["category"])
        ]
        type_labels += row["intrinsic_modules"] + row["relational_modules"]
        for column in ("core_claims", "intrinsic_claims", "relational_claims"):
            for claim in json.loads(row[column]):
                if claim["property"] in wanted:
                    type_labels.append(str(claim["value_label"]))
        profiles.append(
            {"id": row["id"], "label": row["label"], "type_labels": type_labels}
        )
    if out_path is not None:
        out_path = Path(out_path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with open(out_path, "w", encoding="utf-8") as fh:
            for profile in profiles:
                fh.write(json.dumps(profile) + "\n")
    return profiles
