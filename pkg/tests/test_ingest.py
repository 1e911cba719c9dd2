import gzip
import json

import pytest

from graphloom.ingest import (
    CorruptShardError,
    DictLabels,
    EntityRecord,
    LabelStore,
    build_label_store,
    load_property_labels,
    parse_entity,
    resolve_description,
    resolve_label,
    sample_instances,
    stream_shard,
)

from util import (
    FIXTURES,
    coordinate,
    dump_entity,
    quantity,
    ref,
    string,
    time_value,
    write_shard,
)


def test_parse_entity_datatypes():
    obj = dump_entity(
        "Q1",
        "thing",
        "a thing",
        {
            "P31": ref("Q5"),
            "P17": string("plain"),
            "P569": time_value("+1961-08-04T00:00:00Z"),
            "P1082": quantity("+42"),
            "P625": coordinate(1.5, -2.5),
            "P1448": {
                "mainsnak": {
                    "datavalue": {
                        "type": "monolingualtext",
                        "value": {"text": "hello", "language": "en"},
                    }
                }
            },
        },
    )
    record = parse_entity(obj)
    assert record.claims["P31"][0].datatype == "entity-ref"
    assert record.claims["P31"][0].payload == "Q5"
    assert record.claims["P17"][0].datatype == "string"
    assert record.claims["P569"][0].payload == "+1961-08-04T00:00:00Z"
    assert record.claims["P1082"][0].payload == "+42"
    assert record.claims["P625"][0].payload == (1.5, -2.5)
    assert record.claims["P1448"][0].payload == "hello"
    assert record.type_values() == {"Q5"}


def test_parse_entity_qualifiers():
    statement = ref("Q189290")
    statement["qualifiers"] = {
        "P241": [{"datavalue": {"type": "wikibase-entityid", "value": {"id": "Q172771"}}}]
    }
    record = parse_entity(dump_entity("Q2", "x", claims={"P106": statement}))
    (qual,) = record.claims["P106"][0].qualifiers
    assert qual[0] == "P241"
    assert qual[1][0].payload == "Q172771"


def test_snakless_statements_are_dropped():
    record = parse_entity(
        dump_entity("Q3", "x", claims={"P31": [{"mainsnak": {"snaktype": "novalue"}}]})
    )
    assert "P31" not in record.claims


def test_stream_plain_and_gzip(tmp_path):
    objects = [dump_entity(f"Q{i}", f"e{i}") for i in range(5)]
    plain = write_shard(tmp_path / "a.jsonl", objects, compress=False)
    gz = write_shard(tmp_path / "b.jsonl.gz", objects)
    assert [r.id for r in stream_shard(plain)] == [o["id"] for o in objects]
    assert [r.id for r in stream_shard(gz)] == [o["id"] for o in objects]


def test_stream_tolerates_array_framing(tmp_path):
    path = tmp_path / "framed.jsonl"
    body = "[\n" + json.dumps(dump_entity("Q1", "a")) + ",\n" + json.dumps(
        dump_entity("Q2", "b")
    ) + "\n]\n"
    path.write_text(body)
    assert [r.id for r in stream_shard(path)] == ["Q1", "Q2"]


def test_malformed_lines_counted_not_fatal(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(
        json.dumps(dump_entity("Q1", "a")) + "\n" + "{not json}\n" + '{"no_id": 1}\n'
    )
    reader = stream_shard(path)
    ids = [r.id for r in reader]
    assert ids == ["Q1"]
    assert reader.skipped == 2
    assert reader.read == 1


def test_missing_shard_raises():
    with pytest.raises(FileNotFoundError):
        list(stream_shard("/nonexistent/shard.jsonl"))


def test_truncated_gzip_raises_corrupt_shard(tmp_path):
    source = write_shard(
        tmp_path / "big.jsonl.gz", [dump_entity(f"Q{i}", "x" * 200) for i in range(200)]
    )
    data = source.read_bytes()
    broken = tmp_path / "trunc.jsonl.gz"
    broken.write_bytes(data[: len(data) // 2])
    with pytest.raises(CorruptShardError) as exc:
        list(stream_shard(broken))
    assert exc.value.offset >= 0
    assert "trunc.jsonl.gz" in exc.value.path


def test_language_chain_order():
    record = EntityRecord(
        "Q1", {"en-gb": "colour", "mul": "kleur"}, {"mul": "desc"}, {}
    )
    assert resolve_label(record) == "colour"
    assert resolve_label(record, ("mul",)) == "kleur"
    assert resolve_description(record) == "desc"
    assert resolve_label(EntityRecord("Q1", {"fr": "x"}, {}, {})) is None
    with pytest.raises(ValueError):
        resolve_label(record, ())


def test_build_label_store_and_reverse_lookup(tmp_path):
    shard = write_shard(
        tmp_path / "s.jsonl.gz",
        [
            dump_entity("Q1", "alpha"),
            dump_entity("Q2", "beta"),
            dump_entity("Q3", "alpha"),
            dump_entity("Q4", None),  # unlabeled: not stored
        ],
    )
    store = build_label_store([shard], tmp_path / "labels.db", property_labels={"P31": "instance of"})
    assert store.get("Q1") == "alpha"
    assert store.get("P31") == "instance of"
    assert store.get("Q4") is None
    assert "Q2" in store and "Q999" not in store
    assert store.ids_for_label("alpha") == ["Q1", "Q3"]
    assert len(store) == 4
    assert dict(store.items())["Q2"] == "beta"
    store.close()
    # store is rebuildable / reopenable read-only
    again = LabelStore(tmp_path / "labels.db")
    assert again.get("Q3") == "alpha"


def test_property_label_sidecar_formats(tmp_path):
    tab = tmp_path / "props.tsv"
    tab.write_text("# comment\nP31\tinstance of\nP17,country\n\n")
    mapping = load_property_labels(tab)
    assert mapping == {"P31": "instance of", "P17": "country"}


def test_sample_instances(tmp_path):
    shard = write_shard(
        tmp_path / "s.jsonl.gz",
        [dump_entity(f"Q{i}", f"human {i}", "a person", {"P31": ref("Q5")}) for i in range(7)]
        + [dump_entity("Q100", "rock", claims={"P31": ref("Q8063")})],
    )
    samples, count = sample_instances([shard], "Q5", k=3)
    assert count == 7
    assert len(samples) == 3
    assert samples[0] == ("Q0", "human 0", "a person")
    with pytest.raises(ValueError):
        sample_instances([shard], "Q5", k=0)


def test_dict_labels_matches_store_semantics():
    labels = DictLabels({"Q1": "alpha", "Q2": "alpha"})
    assert labels.get("Q1") == "alpha"
    assert labels.get("Q9") is None
    assert labels.ids_for_label("alpha") == ["Q1", "Q2"]
    assert len(labels) == 2


def test_fixture_dump_parses_cleanly():
    reader = stream_shard(FIXTURES / "entities.jsonl")
    records = list(reader)
    assert reader.skipped == 0
    assert {"Q312", "Q75503392", "Q30"} <= {r.id for r in records}
