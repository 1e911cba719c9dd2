"""Single CLI entry point exposing every pipeline stage as a subcommand."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import yaml

from . import cleaning as cleaning_mod
from .classify import classify_shards, read_stats
from .figures import render_bipartite, render_coverage
from .ingest import LabelStore, build_label_store
from .refine import (
    ProcessOracle,
    ScriptedOracle,
    agreement_audit,
    category_analysis,
    refine as run_refine,
)
from .refine.oracle import InteractiveOracle
from .runs import RunManifest
from .schema import (
    generate_extraction_prompt,
    load_schema,
    schema_stats,
    validate_schema,
)


def _fail(message: str, code: int = 1):
    click.echo(f"error\t{message}", err=True)
    sys.exit(code)


def _shard_paths(shards_dir) -> list[Path]:
    paths = sorted(Path(shards_dir).glob("*.jsonl*"))
    if not paths:
        _fail(f"no shards (*.jsonl, *.jsonl.gz, *.jsonl.zst) under {shards_dir}")
    return paths


def _labels(path) -> LabelStore | None:
    return LabelStore(path) if path else None


@click.group()
def main():
    """Schema-driven pipeline from raw entity dumps to a typed property graph."""


@main.command("labels-build")
@click.option("--shards", required=True, type=click.Path(exists=True), help="shard directory")
@click.option("--out", required=True, type=click.Path(), help="label store file to write")
@click.option("--property-labels", type=click.Path(exists=True), help="sidecar property-label file")
def labels_build(shards, out, property_labels):
    """Build the persistent id->label store from a full shard scan."""
    store = build_label_store(_shard_paths(shards), out, property_labels=property_labels)
    click.echo(f"labels\t{len(store)}\t{out}")


@main.command()
@click.option("--shards", required=True, type=click.Path(exists=True))
@click.option("--rules", type=click.Path(exists=True), help="cleaning rules file (default: packaged rules)")
@click.option("--out", required=True, type=click.Path(), help="core-id file to write")
@click.option("--stats-out", type=click.Path(), help="write tier counts here")
@click.option("--run", "run_dir", type=click.Path(), help="run directory for the stage manifest")
def clean(shards, rules, out, stats_out, run_dir):
    """Run the cleaning cascade and persist the sorted core-id set."""
    rule_set = cleaning_mod.load_rules(rules)
    core_ids, stats = cleaning_mod.clean_shards(_shard_paths(shards), rule_set, out)
    text = "\n".join(stats.as_lines())
    if stats_out:
        Path(stats_out).write_text(text + "\n", encoding="utf-8")
    if run_dir:
        manifest = RunManifest.open(run_dir)
        manifest.record_stage("clean", {"shards": shards}, {"core_ids": out})
    click.echo(text)


@main.command()
@click.option("--shards", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_dir", required=True, type=click.Path(exists=True))
@click.option("--core-ids", type=click.Path(exists=True))
@click.option("--labels", "labels_path", type=click.Path(exists=True))
@click.option("--out", "run_dir", required=True, type=click.Path(), help="run directory")
def classify(shards, schema_dir, core_ids, labels_path, run_dir):
    """Classify core entities; Parquet output plus a stats report."""
    schema = load_schema(schema_dir)
    report = validate_schema(schema)
    if not report.is_valid():
        _fail("schema invalid: " + "; ".join(v.message for v in report.errors()[:3]))
    core = cleaning_mod.load_core_ids(core_ids) if core_ids else None
    out_dir = Path(run_dir) / "classified"
    _, stats = classify_shards(
        _shard_paths(shards), core, schema, _labels(labels_path), out_dir
    )
    manifest = RunManifest.open(run_dir)
    manifest.schema_version = schema.version
    manifest.record_stage(
        "classify",
        {"shards": shards, "schema": schema_dir},
        {"classified": str(out_dir)},
    )
    click.echo(f"classified\t{stats.classified}/{stats.total}")
    click.echo(f"r_c\t{stats.r_c:.6f}")
    click.echo(f"r_m\t{stats.r_m:.6f}")


@main.command()
@click.option("--schema", "schema_dir", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_path", type=click.Path(exists=True))
def validate(schema_dir, labels_path):
    """Validate schema structure; violations print one per line."""
    try:
        schema = load_schema(schema_dir)
    except Exception as exc:
        _fail(str(exc))
    report = validate_schema(schema, _labels(labels_path))
    text = report.as_text()
    if text:
        click.echo(text)
    if not report.is_valid():
        sys.exit(1)


def _make_oracle(spec: str):
    if spec == "interactive":
        return InteractiveOracle()
    if spec.startswith("exec:"):
        return ProcessOracle(spec[len("exec:"):])
    return ScriptedOracle(spec)


@main.command("refine")
@click.option("--shards", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_dir", required=True, type=click.Path(exists=True))
@click.option("--oracle", "oracle_spec", required=True, help="answer file, exec:CMD, or 'interactive'")
@click.option("--theta-c", default=0.9, show_default=True)
@click.option("--theta-m", default=0.9, show_default=True)
@click.option("--max-rounds", default=10, show_default=True)
@click.option("--k-freq", default=20, show_default=True)
@click.option("--k-hub", default=20, show_default=True)
@click.option("--core-ids", type=click.Path(exists=True))
@click.option("--labels", "labels_path", type=click.Path(exists=True))
@click.option("--run", "run_dir", required=True, type=click.Path())
@click.option("--auto-accept/--no-auto-accept", default=True, show_default=True,
              help="accept every valid oracle decision without human review")
@click.option("--schema-out", type=click.Path(), help="write the refined schema here")
def refine_cmd(shards, schema_dir, oracle_spec, theta_c, theta_m, max_rounds,
               k_freq, k_hub, core_ids, labels_path, run_dir, auto_accept, schema_out):
    """Run the refinement loop until coverage targets or max rounds."""
    from .schema import serialize_schema
    from .refine.oracle import ACCEPTED

    schema = load_schema(schema_dir)
    core = cleaning_mod.load_core_ids(core_ids) if core_ids else None
    reviewer = None
    if not auto_accept:
        def reviewer(decisions):
            # decisions stay pending; review happens via the dashboard/API
            return
    final_schema, rounds = run_refine(
        _shard_paths(shards),
        core,
        schema,
        _make_oracle(oracle_spec),
        theta_c=theta_c,
        theta_m=theta_m,
        max_rounds=max_rounds,
        labels=_labels(labels_path),
        k_freq=k_freq,
        k_hub=k_hub,
        run_dir=run_dir,
        reviewer=reviewer,
    )
    if schema_out:
        serialize_schema(final_schema, schema_out)
    manifest = RunManifest.open(run_dir)
    manifest.record_stage("refine", {"schema": schema_dir}, {"rounds": str(len(rounds))})
    last = rounds[-1].after or rounds[-1].before if rounds else None
    stats = read_stats(Path(run_dir) / "classified")
    click.echo(f"rounds\t{len(rounds)}")
    click.echo(f"r_c\t{stats.r_c:.6f}")
    click.echo(f"r_m\t{stats.r_m:.6f}")


@main.command()
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def analyze(run_dir, schema_dir, out_dir):
    """Category/type analysis report plus rendered figures."""
    schema = load_schema(schema_dir)
    classified_dir = Path(run_dir) / "classified"
    report = category_analysis(classified_dir, schema)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "analysis.tsv").write_text("\n".join(report.as_lines()) + "\n", encoding="utf-8")
    (out / "analysis.json").write_text(json.dumps(report.as_dict(), indent=2), encoding="utf-8")
    span = schema_stats(schema)
    (out / "span.tsv").write_text("\n".join(span.as_lines()) + "\n", encoding="utf-8")
    render_bipartite(span, out / "bipartite.png")
    stats = read_stats(classified_dir)
    render_coverage(stats, out / "coverage.png")
    click.echo(f"analysis\t{out}")


@main.command()
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--modules", help="comma-separated relational module filter")
@click.option("--core-ids", type=click.Path(exists=True))
@click.option("--labels", "labels_path", type=click.Path(exists=True))
@click.option("--profiles/--no-profiles", default=True, show_default=True)
def export(run_dir, schema_dir, out_dir, modules, core_ids, labels_path, profiles):
    """Three-pass node/edge/stub export plus entity profiles."""
    from .export import export_graph, export_profiles

    schema = load_schema(schema_dir)
    classified_dir = Path(run_dir) / "classified"
    module_filter = set(modules.split(",")) if modules else None
    core = cleaning_mod.load_core_ids(core_ids) if core_ids else None
    labels = _labels(labels_path)
    export_graph(classified_dir, core, schema, labels, out_dir, module_filter)
    if profiles:
        export_profiles(classified_dir, schema, labels, Path(out_dir) / "profiles.jsonl")
    manifest = RunManifest.open(run_dir)
    manifest.record_stage("export", {"classified": str(classified_dir)}, {"out": out_dir})
    click.echo(f"export\t{out_dir}")


@main.command()
@click.option("--schema", "schema_dir", required=True, type=click.Path(exists=True))
@click.option("--label-map", type=click.Path(exists=True),
              help="YAML mapping category id -> display name (default: title-cased ids)")
def prompt(schema_dir, label_map):
    """Render the schema-guided extraction prompt to stdout."""
    schema = load_schema(schema_dir)
    if label_map:
        mapping = yaml.safe_load(Path(label_map).read_text(encoding="utf-8"))
    else:
        mapping = {c.id: c.id.replace("_", " ").title() for c in schema.categories}
    click.echo(generate_extraction_prompt(schema, mapping))


@main.command()
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--external", required=True, type=click.Path(exists=True),
              help="JSON/YAML mapping entity id -> external label")
@click.option("--mapping", required=True, type=click.Path(exists=True),
              help="JSON/YAML mapping category -> allowed external labels")
def audit(run_dir, external, mapping):
    """Agreement audit of schema categories against an external labeling."""
    ext = yaml.safe_load(Path(external).read_text(encoding="utf-8"))
    map_doc = yaml.safe_load(Path(mapping).read_text(encoding="utf-8"))
    report = agreement_audit(
        Path(run_dir) / "classified",
        {str(k): str(v) for k, v in ext.items()},
        {str(k): set(v) for k, v in map_doc.items()},
    )
    click.echo(json.dumps(report.as_dict(), indent=2))


@main.command()
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_dir", required=True, type=click.Path(exists=True))
@click.option("--shards", type=click.Path(exists=True))
@click.option("--labels", "labels_path", type=click.Path(exists=True))
@click.option("--core-ids", type=click.Path(exists=True))
@click.option("--frontend", type=click.Path(exists=True), help="static dashboard assets")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8321, show_default=True)
def serve(run_dir, schema_dir, shards, labels_path, core_ids, frontend, host, port):
    """Serve the review API (and dashboard, when assets are given)."""
    import uvicorn

    from .api import create_app

    app = create_app(run_dir, schema_dir, shards, labels_path, core_ids, frontend)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
