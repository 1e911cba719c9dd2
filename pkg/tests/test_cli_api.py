import json
import shutil
import time

import pytest
import yaml
from click.testing import CliRunner
from fastapi.testclient import TestClient

from graphloom.api import create_app
from graphloom.cli import main
from graphloom.ingest import build_label_store
from graphloom.refine import ScriptedOracle, refine
from graphloom.schema import load_schema, serialize_schema

from util import FIXTURES, dump_entity, ref, write_shard
from test_refinement import seed_dump, seed_labels, seed_schema


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A CLI working tree: shard dir, label store, and room for runs."""
    root = tmp_path_factory.mktemp("cli")
    shards = root / "shards"
    shards.mkdir()
    shutil.copy(FIXTURES / "entities.jsonl", shards / "entities.jsonl")
    label_source = root / "label-source"
    label_source.mkdir()
    shutil.copy(FIXTURES / "entities.jsonl", label_source / "entities.jsonl")
    shutil.copy(FIXTURES / "concepts.jsonl", label_source / "concepts.jsonl")
    return root


def run_cli(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_cli_pipeline_end_to_end(workspace):
    shards = workspace / "shards"
    labels = workspace / "labels.db"
    core = workspace / "core.ids"
    run_dir = workspace / "run"

    result = run_cli(
        "labels-build", "--shards", workspace / "label-source",
        "--out", labels, "--property-labels", FIXTURES / "property_labels.tsv",
    )
    assert result.exit_code == 0, result.output
    assert result.output.startswith("labels\t")

    result = run_cli("clean", "--shards", shards, "--out", core,
                     "--stats-out", workspace / "clean.tsv")
    assert result.exit_code == 0, result.output
    assert "total\t21" in result.output
    assert core.read_text().splitlines() == sorted(core.read_text().splitlines())

    result = run_cli(
        "classify", "--shards", shards, "--schema", FIXTURES / "schema",
        "--core-ids", core, "--labels", labels, "--out", run_dir,
    )
    assert result.exit_code == 0, result.output
    assert "r_c\t1.000000" in result.output
    assert "r_m\t1.000000" in result.output
    assert (run_dir / "classified" / "class-stats.json").exists()
    assert (run_dir / "run-manifest.json").exists()

    result = run_cli("validate", "--schema", FIXTURES / "schema", "--labels", labels)
    assert result.exit_code == 0, result.output

    out = workspace / "analysis"
    result = run_cli("analyze", "--run", run_dir, "--schema", FIXTURES / "schema", "--out", out)
    assert result.exit_code == 0, result.output
    assert (out / "analysis.tsv").read_text().startswith("total\t")
    assert json.loads((out / "analysis.json").read_text())["classified"] == 21
    assert "module\treligion\trelational\t7" in (out / "span.tsv").read_text()
    # the report path renders figures alongside the delimited output
    assert (out / "bipartite.png").stat().st_size > 0
    assert (out / "coverage.png").stat().st_size > 0

    export_dir = workspace / "export"
    result = run_cli(
        "export", "--run", run_dir, "--schema", FIXTURES / "schema",
        "--out", export_dir, "--core-ids", core, "--labels", labels,
    )
    assert result.exit_code == 0, result.output
    assert (export_dir / "manifest.json").exists()
    assert (export_dir / "profiles.jsonl").exists()

    filtered = workspace / "export-filtered"
    result = run_cli(
        "export", "--run", run_dir, "--schema", FIXTURES / "schema",
        "--out", filtered, "--modules", "government,legal,politics",
        "--core-ids", core, "--labels", labels, "--no-profiles",
    )
    assert result.exit_code == 0, result.output
    assert sorted(p.stem for p in (filtered / "edges").glob("*.csv")) == [
        "government", "legal", "politics"
    ]

    result = run_cli("prompt", "--schema", FIXTURES / "schema")
    assert result.exit_code == 0
    assert "### Entity Categories" in result.output
    assert "- Organizations:" in result.output

    external = workspace / "external.yaml"
    external.write_text("Q312: ORG\nQ76: PER\n")
    mapping = workspace / "mapping.yaml"
    mapping.write_text("organizations: [ORG]\npeople: [PER]\n")
    result = run_cli("audit", "--run", run_dir, "--external", external, "--mapping", mapping)
    assert result.exit_code == 0
    assert json.loads(result.output)["agreement_rate"] == 1.0


def test_cli_validate_fails_on_broken_schema(tmp_path):
    (tmp_path / "priority.yaml").write_text("categories:\n  - broken\n")
    (tmp_path / "broken.yaml").write_text(
        "gates:\n  - Q1\nmodules:\n  m:\n    type: relational\n"
        "    indicators:\n      P50:\n    value_props:\n      - P50\n"
    )
    result = run_cli("validate", "--schema", tmp_path)
    assert result.exit_code == 1
    assert "sync" in result.output


def test_cli_classify_rejects_invalid_schema(tmp_path, workspace):
    (tmp_path / "priority.yaml").write_text("categories:\n  - broken\n")
    (tmp_path / "broken.yaml").write_text(
        "gates:\n  - Q1\nmodules:\n  m:\n    type: relational\n"
        "    indicators:\n      P50:\n    value_props:\n      - P50\n"
    )
    result = run_cli(
        "classify", "--shards", workspace / "shards", "--schema", tmp_path,
        "--out", tmp_path / "run",
    )
    assert result.exit_code == 1


def test_cli_refine_with_scripted_oracle(tmp_path):
    shards = tmp_path / "shards"
    write_shard(shards / "s.jsonl.gz", seed_dump())
    schema_dir = tmp_path / "schema"
    serialize_schema(seed_schema(), schema_dir)
    store = build_label_store(
        [shards / "s.jsonl.gz"], tmp_path / "labels.db",
        property_labels={k: seed_labels().get(k) for k in
                         ("P21", "P26", "P31", "P569", "Q5", "Q801", "Q802")},
    )
    store.close()
    answers = tmp_path / "answers.yaml"
    answers.write_text(yaml.safe_dump({
        "Q801": {"verdict": "assign", "category": "people"},
        "Q802": {"verdict": "assign", "category": "people"},
    }))
    result = run_cli(
        "refine", "--shards", shards, "--schema", schema_dir,
        "--oracle", answers, "--labels", tmp_path / "labels.db",
        "--run", tmp_path / "run", "--schema-out", tmp_path / "schema-out",
    )
    assert result.exit_code == 0, result.output
    assert "rounds\t1" in result.output
    assert "r_c\t1.000000" in result.output
    refined = load_schema(tmp_path / "schema-out")
    assert {"Q801", "Q802"} <= refined.category("people").gate_set()


# ---------------------------------------------------------------------------
# HTTP API


@pytest.fixture
def service(tmp_path):
    """A run dir with one pending round of three decisions, plus the app."""
    shards = tmp_path / "shards"
    dump = seed_dump() + [
        dump_entity("Q111", "stray 111", "typed Q803", {"P31": ref("Q803")}),
        dump_entity("Q112", "stray 112", "typed Q803", {"P31": ref("Q803")}),
    ]
    write_shard(shards / "s.jsonl.gz", dump)
    schema_dir = tmp_path / "schema"
    serialize_schema(seed_schema(), schema_dir)
    labels_path = tmp_path / "labels.db"
    extra = {k: seed_labels().get(k) for k in ("P21", "P26", "P31", "P569", "Q5", "Q801", "Q802")}
    extra["Q803"] = "novel type c"
    build_label_store([shards / "s.jsonl.gz"], labels_path, property_labels=extra).close()

    run_dir = tmp_path / "run"
    oracle = ScriptedOracle({
        "Q801": {"verdict": "assign", "category": "people"},
        "Q802": {"verdict": "assign", "category": "people"},
        "Q803": {"verdict": "assign", "category": "people"},
    })
    # a do-nothing reviewer leaves all three decisions pending for the API
    refine(
        [shards / "s.jsonl.gz"], None, load_schema(schema_dir), oracle,
        labels=None, run_dir=run_dir, reviewer=lambda decisions: None,
    )
    app = create_app(run_dir, schema_dir, shards, labels_path, None)
    return {"client": TestClient(app), "run_dir": run_dir, "schema_dir": schema_dir}


def wait_for_job(client, job_id, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        doc = client.get(f"/api/v1/jobs/{job_id}").json()
        if doc["status"] != "running":
            return doc
        time.sleep(0.05)
    raise AssertionError("job did not finish in time")


def test_api_read_endpoints(service):
    client = service["client"]
    coverage = client.get("/api/v1/coverage").json()
    assert coverage["total"] == 12
    assert coverage["r_c"] == 0.5
    failures = client.get("/api/v1/failures").json()
    assert set(failures["unclassified"]) == {"Q107", "Q108", "Q109", "Q110", "Q111", "Q112"}
    candidates = client.get("/api/v1/candidates").json()
    assert [c["type_id"] for c in candidates] == ["Q801", "Q802", "Q803"]
    span = client.get("/api/v1/span").json()
    assert span["modules"]["family"]["kind"] == "relational"
    validation = client.get("/api/v1/validation").json()
    assert validation["valid"]
    decisions = client.get("/api/v1/decisions").json()
    assert len(decisions) == 3
    assert all(d["review_state"] == "pending" and d["version"] == 0 for d in decisions)


def test_api_coverage_404_without_run(tmp_path):
    serialize_schema(seed_schema(), tmp_path / "schema")
    client = TestClient(create_app(tmp_path / "empty-run", tmp_path / "schema"))
    assert client.get("/api/v1/coverage").status_code == 404
    assert client.get("/api/v1/decisions").json() == []
    assert client.get("/api/v1/jobs/nope").status_code == 404


def test_api_review_validation(service):
    client = service["client"]
    assert client.post(
        "/api/v1/decisions/r0-Q801/review", json={"state": "maybe"}
    ).status_code == 422
    assert client.post(
        "/api/v1/decisions/r9-Q999/review", json={"state": "accepted"}
    ).status_code == 404


def test_api_reclassify_requires_accepted_decisions(service):
    response = service["client"].post("/api/v1/reclassify")
    assert response.status_code == 409
    assert "no accepted decisions" in response.json()["error"]


def test_api_review_round_trip(service):
    """Accept 2 of 3 pending decisions, apply, and the persisted round
    report contains exactly those 2 edits."""
    client = service["client"]
    first = client.post("/api/v1/decisions/r0-Q801/review", json={"state": "accepted"})
    assert first.status_code == 200 and first.json()["version"] == 1
    client.post("/api/v1/decisions/r0-Q802/review", json={"state": "accepted"})
    client.post("/api/v1/decisions/r0-Q803/review", json={"state": "rejected", "note": "not people"})

    view = {d["decision_id"]: d for d in client.get("/api/v1/decisions").json()}
    assert view["r0-Q801"]["review_state"] == "accepted"
    assert view["r0-Q803"]["note"] == "not people"

    started = client.post("/api/v1/reclassify")
    assert started.status_code == 200
    job = wait_for_job(client, started.json()["job_id"])
    assert job["status"] == "done", job

    rounds = client.get("/api/v1/rounds").json()
    assert rounds[-1]["index"] == 1
    added = rounds[-1]["diff"]["added_gates"]
    assert sorted(g["type_id"] for g in added) == ["Q801", "Q802"]
    # Q803 instances remain unclassified; everything else now lands
    coverage = client.get("/api/v1/coverage").json()
    assert coverage["r_c"] == pytest.approx(10 / 12)
    assert sorted(coverage["unclassified_ids"]) == ["Q111", "Q112"]
    # the applied schema was written back to disk
    schema = load_schema(service["schema_dir"])
    gates = schema.category("people").gate_set()
    assert {"Q801", "Q802"} <= gates and "Q803" not in gates
