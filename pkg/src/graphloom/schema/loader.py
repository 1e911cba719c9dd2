"""Schema directory loading and serialization.

Layout: one YAML file per category plus ``priority.yaml``, a manifest that
fixes the category matching order (filename order is never trusted):

    priority.yaml        version + ordered category list
    <category>.yaml      gates / core_properties / modules

Every identifier in a category file may carry an inline ``# label`` comment.
Comments are collected into ``SchemaConfig.annotations`` on load and written
back on serialization, so load -> serialize -> load is a fixpoint.
"""

from __future__ import annotations

import re
from pathlib import Path

import yaml

from .model import (
    CategoryDef,
    Indicator,
    ModuleDef,
    SchemaConfig,
    SchemaError,
)

MANIFEST_NAME = "priority.yaml"

_ANNOTATION_RE = re.compile(
    r"^\s*-?\s*\"?([QP]\d+)\"?\s*:?\s*(?:#\s*(.*\S))?\s*$"
)


class SchemaParseError(SchemaError):
    def __init__(self, path, message, line=None):
        self.path = str(path)
        self.line = line
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")


def _load_yaml(path: Path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        line = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line = mark.line + 1
        raise SchemaParseError(path, f"malformed YAML: {exc}", line) from exc


def _collect_annotations(path: Path, into: dict[str, str]) -> None:
    for raw in path.read_text(encoding="utf-8").splitlines():
        m = _ANNOTATION_RE.match(raw)
        if m and m.group(2):
            into[m.group(1)] = m.group(2)


def _parse_indicators(cat_id: str, mod_name: str, raw) -> tuple[Indicator, ...]:
    if not isinstance(raw, dict):
        raise SchemaError(
            f"category {cat_id}, module {mod_name}: indicators must be a mapping"
        )
    out = []
    for prop, values in raw.items():
        if values is None:
            out.append(Indicator(property=str(prop)))
        elif isinstance(values, list):
            out.append(Indicator(property=str(prop), values=tuple(str(v) for v in values)))
        else:
            raise SchemaError(
                f"category {cat_id}, module {mod_name}: indicator {prop} must be "
                "null (presence) or a list of ids"
            )
    return tuple(out)


def parse_category(cat_id: str, doc) -> CategoryDef:
    if not isinstance(doc, dict):
        raise SchemaError(f"category {cat_id}: file must contain a mapping")
    gates = tuple(str(g) for g in (doc.get("gates") or []))
    core = tuple(str(p) for p in (doc.get("core_properties") or []))
    modules = []
    for name, body in (doc.get("modules") or {}).items():
        if not isinstance(body, dict):
            raise SchemaError(f"category {cat_id}, module {name}: must be a mapping")
        modules.append(
            ModuleDef(
                name=str(name),
                kind=str(body.get("type", "")),
                indicators=_parse_indicators(cat_id, name, body.get("indicators") or {}),
                value_props=tuple(str(p) for p in (body.get("value_props") or [])),
            )
        )
    return CategoryDef(
        id=cat_id, gate_values=gates, core_properties=core, modules=tuple(modules)
    )


def load_schema(schema_dir) -> SchemaConfig:
    """Load a schema directory into an immutable SchemaConfig."""
    schema_dir = Path(schema_dir)
    manifest_path = schema_dir / MANIFEST_NAME
    if not manifest_path.exists():
        raise SchemaParseError(schema_dir, f"missing {MANIFEST_NAME}")
    manifest = _load_yaml(manifest_path)
    if not isinstance(manifest, dict) or not manifest.get("categories"):
        raise SchemaParseError(manifest_path, "manifest must list categories")

    annotations: dict[str, str] = {}
    categories = []
    for cat_id in manifest["categories"]:
        path = schema_dir / f"{cat_id}.yaml"
        if not path.exists():
            raise SchemaParseError(path, f"category file for {cat_id!r} not found")
        doc = _load_yaml(path)
        try:
            categories.append(parse_category(str(cat_id), doc))
        except SchemaError as exc:
            if isinstance(exc, SchemaParseError):
                raise
            raise SchemaParseError(path, str(exc)) from exc
        _collect_annotations(path, annotations)

    return SchemaConfig(
        categories=tuple(categories),
        version=str(manifest.get("version", "0")),
        annotations=annotations,
    )


def _annotated(ident: str, annotations: dict[str, str], key: bool = False) -> str:
    label = annotations.get(ident)
    base = f"{ident}:" if key else ident
    return f"{base}  # {label}" if label else base


def serialize_schema(schema: SchemaConfig, schema_dir) -> None:
    """Write a schema back to a directory in the canonical layout."""
    schema_dir = Path(schema_dir)
    schema_dir.mkdir(parents=True, exist_ok=True)
    ann = schema.annotations

    version = yaml.safe_dump(
        schema.version, default_flow_style=True
    ).strip().removesuffix("...").strip()
    manifest_lines = [f"version: {version}", "categories:"]
    manifest_lines += [f"  - {c.id}" for c in schema.categories]
    (schema_dir / MANIFEST_NAME).write_text("\n".join(manifest_lines) + "\n", encoding="utf-8")

    for cat in schema.categories:
        lines = ["gates:"]
        lines += [f"  - {_annotated(g, ann)}" for g in cat.gate_values]
        lines.append("core_properties:")
        lines += [f"  - {_annotated(p, ann)}" for p in cat.core_properties]
        if cat.modules:
            lines.append("modules:")
            for mod in cat.modules:
                lines.append(f"  {mod.name}:")
                lines.append(f"    type: {mod.kind}")
                lines.append("    indicators:")
                for ind in mod.indicators:
                    lines.append(f"      {_annotated(ind.property, ann, key=True)}")
                    for v in ind.values:
                        lines.append(f"        - {_annotated(v, ann)}")
                lines.append("    value_props:")
                for p in mod.value_props:
                    lines.append(f"      - {_annotated(p, ann)}")
        (schema_dir / f"{cat.id}.yaml").write_text("\n".join(lines) + "\n", encoding="utf-8")
