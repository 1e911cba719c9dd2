import json
from pathlib import Path

import pytest

from graphloom.ingest import DictLabels, load_property_labels, resolve_label, stream_shard
from graphloom.schema import load_schema

from util import FIXTURES


@pytest.fixture(scope="session")
def fixture_schema():
    return load_schema(FIXTURES / "schema")


@pytest.fixture(scope="session")
def education_schema():
    return load_schema(FIXTURES / "schema_education")


@pytest.fixture(scope="session")
def fixture_labels():
    mapping = dict(load_property_labels(FIXTURES / "property_labels.tsv"))
    for shard in ("entities.jsonl", "concepts.jsonl"):
        for record in stream_shard(FIXTURES / shard):
            mapping[record.id] = resolve_label(record)
    return DictLabels(mapping)


@pytest.fixture(scope="session")
def fixture_records():
    return {r.id: r for r in stream_shard(FIXTURES / "entities.jsonl")}


@pytest.fixture(scope="session")
def fixture_run(tmp_path_factory, fixture_schema, fixture_labels):
    """One classified run over the committed fixture dump, shared read-only."""
    from graphloom.classify import classify_shards

    run_dir = tmp_path_factory.mktemp("fixture-run")
    out_dir = run_dir / "classified"
    _, stats = classify_shards(
        [FIXTURES / "entities.jsonl"], None, fixture_schema, fixture_labels, out_dir
    )
    return {"run_dir": run_dir, "classified": out_dir, "stats": stats}
