"""Streaming dump ingest: shard reader, label resolution, label store.

Shards are line-delimited entity JSON in the Wikidata dump layout, one
object per line, optionally compressed. Supported suffixes: ``.jsonl``
(plain), ``.jsonl.gz`` (gzip, stdlib), and ``.jsonl.zst`` when the
``zstandard`` package is importable. Reading is single-pass; memory use is
bounded by the longest line.

The label store is a single sqlite file mapping id -> canonical display
label, with an index on the label column serving as the reverse
(label -> ids) lookup. It is rebuildable from the shards at any time.
"""

from __future__ import annotations

import gzip
import io
import json
import sqlite3
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

DEFAULT_LANGUAGE_CHAIN = ("en", "en-us", "en-gb", "mul")

ENTITY_REF = "entity-ref"
STRING = "string"
TIME = "time"
QUANTITY = "quantity"
COORDINATE = "coordinate"
OTHER = "other"


class CorruptShardError(Exception):
    def __init__(self, path, offset, cause):
        self.path = str(path)
        self.offset = offset
        super().__init__(f"{path}: decompression failed near byte {offset}: {cause}")


@dataclass(frozen=True)
class ClaimValue:
    datatype: str
    payload: object
    qualifiers: tuple[tuple[str, tuple["ClaimValue", ...]], ...] = ()

    def is_entity(self) -> bool:
        return self.datatype == ENTITY_REF


@dataclass(frozen=True)
class EntityRecord:
    id: str
    labels: dict[str, str]
    descriptions: dict[str, str]
    claims: dict[str, tuple[ClaimValue, ...]]

    def type_values(self) -> set[str]:
        """Entity ids asserted via instance-of / subclass-of."""
        out = set()
        for prop in ("P31", "P279"):
            for cv in self.claims.get(prop, ()):
                if cv.datatype == ENTITY_REF:
                    out.add(cv.payload)
        return out


def _parse_snak_value(snak) -> ClaimValue | None:
    dv = snak.get("datavalue")
    if dv is None:
        return None
    vtype, value = dv.get("type"), dv.get("value")
    if vtype == "wikibase-entityid":
        ident = value.get("id") if isinstance(value, dict) else value
        if not isinstance(ident, str) or not ident[:1] in "QP":
            return ClaimValue(OTHER, value)
        return ClaimValue(ENTITY_REF, ident)
    if vtype == "string":
        return ClaimValue(STRING, value)
    if vtype == "monolingualtext":
        return ClaimValue(STRING, value.get("text", ""))
    if vtype == "time":
        return ClaimValue(TIME, value.get("time", ""))
    if vtype == "quantity":
        return ClaimValue(QUANTITY, value.get("amount", ""))
    if vtype == "globecoordinate":
        return ClaimValue(
            COORDINATE, (value.get("latitude"), value.get("longitude"))
        )
    return ClaimValue(OTHER, value)


def parse_entity(obj: dict) -> EntityRecord:
    labels = {
        lang: body["value"]
        for lang, body in (obj.get("labels") or {}).items()
        if isinstance(body, dict) and "value" in body
    }
    descriptions = {
        lang: body["value"]
        for lang, body in (obj.get("descriptions") or {}).items()
        if isinstance(body, dict) and "value" in body
    }
    claims: dict[str, tuple[ClaimValue, ...]] = {}
    for prop, statements in (obj.get("claims") or {}).items():
        values = []
        for st in statements:
            snak = st.get("mainsnak") or {}
            cv = _parse_snak_value(snak)
            if cv is None:
                continue
            quals = []
            for qprop, qsnaks in (st.get("qualifiers") or {}).items():
                qvals = tuple(
                    v for v in (_parse_snak_value(q) for q in qsnaks) if v is not None
                )
                if qvals:
                    quals.append((qprop, qvals))
            if quals:
                cv = ClaimValue(cv.datatype, cv.payload, tuple(quals))
            values.append(cv)
        if values:
            claims[prop] = tuple(values)
    return EntityRecord(
        id=obj["id"], labels=labels, descriptions=descriptions, claims=claims
    )


def _open_shard(path: Path) -> io.BufferedIOBase:
    name = path.name
    if name.endswith(".zst"):
        try:
            import zstandard
        except ImportError as exc:  # pragma: no cover - environment dependent
            raise RuntimeError(
                f"{path}: .zst shards need the 'zstandard' package installed"
            ) from exc
        return zstandard.ZstdDecompressor().stream_reader(open(path, "rb"))
    if name.endswith(".gz"):
        return gzip.open(path, "rb")
    return open(path, "rb")


@dataclass
class ShardReader:
    """Iterates EntityRecords from one shard, counting skipped lines."""

    path: Path
    skipped: int = 0
    read: int = 0

    def __iter__(self) -> Iterator[EntityRecord]:
        path = Path(self.path)
        if not path.exists():
            raise FileNotFoundError(path)
        offset = 0
        stream = _open_shard(path)
        try:
            for raw in io.TextIOWrapper(stream, encoding="utf-8", errors="replace"):
                offset += len(raw)
                line = raw.strip().rstrip(",")
                if not line or line in ("[", "]"):
                    continue
                try:
                    obj = json.loads(line)
                    record = parse_entity(obj)
                except (ValueError, KeyError, TypeError):
                    self.skipped += 1
                    continue
                self.read += 1
                yield record
        except (OSError, EOFError) as exc:
            if isinstance(exc, FileNotFoundError):
                raise
            raise CorruptShardError(path, offset, exc) from exc
        finally:
            stream.close()


def stream_shard(path) -> ShardReader:
    """One EntityRecord per well-formed line; malformed lines are counted
    on the returned reader's ``skipped`` attribute, not fatal."""
    return ShardReader(Path(path))


def resolve_label(
    entity: EntityRecord, chain: Iterable[str] = DEFAULT_LANGUAGE_CHAIN
) -> str | None:
    chain = tuple(chain)
    if not chain:
        raise ValueError("language chain must be non-empty")
    for lang in chain:
        if lang in entity.labels:
            return entity.labels[lang]
    return None


def resolve_description(
    entity: EntityRecord, chain: Iterable[str] = DEFAULT_LANGUAGE_CHAIN
) -> str | None:
    # the label fallback chain applies to descriptions as well
    for lang in tuple(chain):
        if lang in entity.descriptions:
            return entity.descriptions[lang]
    return None


class LabelStore:
    """Read path over the persistent id -> label sqlite store.

    A missing key returns None, never an empty string. ``ids_for_label``
    is the exact-string reverse lookup.
    """

    def __init__(self, path):
        self.path = str(path)
        self._conn = sqlite3.connect(f"file:{self.path}?mode=ro", uri=True)
        self._cache: dict[str, str | None] = {}

    def get(self, ident: str) -> str | None:
        if ident in self._cache:
            return self._cache[ident]
        row = self._conn.execute(
            "SELECT label FROM labels WHERE id = ?", (ident,)
        ).fetchone()
        value = row[0] if row else None
        if len(self._cache) < 1_000_000:
            self._cache[ident] = value
        return value

    def __contains__(self, ident: str) -> bool:
        return self.get(ident) is not None

    def ids_for_label(self, label: str) -> list[str]:
        rows = self._conn.execute(
            "SELECT id FROM labels WHERE label = ? ORDER BY id", (label,)
        ).fetchall()
        return [r[0] for r in rows]

    def __len__(self) -> int:
        return self._conn.execute("SELECT COUNT(*) FROM labels").fetchone()[0]

    def items(self):
        yield from self._conn.execute("SELECT id, label FROM labels ORDER BY id")

    def close(self):
        self._conn.close()


def load_property_labels(path) -> dict[str, str]:
    """Sidecar property labels: two-column delimited text (id<TAB>label)."""
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        ident, _, label = line.partition("\t")
        if _ == "":
            ident, _, label = line.partition(",")
        out[ident.strip()] = label.strip()
    return out


def build_label_store(
    shards: Iterable, out_path, chain=DEFAULT_LANGUAGE_CHAIN, property_labels=None
) -> LabelStore:
    """Scan shards once and persist every resolvable id -> label pair.

    ``property_labels`` may be a sidecar file path or a dict; dumps that
    interleave property entities need no sidecar.
    """
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if out_path.exists():
        out_path.unlink()
    conn = sqlite3.connect(out_path)
    conn.execute("CREATE TABLE labels (id TEXT PRIMARY KEY, label TEXT NOT NULL)")
    conn.execute("CREATE INDEX labels_reverse ON labels(label)")

    def insert_many(pairs):
        conn.executemany(
            "INSERT OR REPLACE INTO labels (id, label) VALUES (?, ?)", pairs
        )

    batch = []
    for shard in shards:
        for record in stream_shard(shard):
            label = resolve_label(record, chain)
            if label is None:
                continue
            batch.append((record.id, label))
            if len(batch) >= 10_000:
                insert_many(batch)
                batch.clear()
    if property_labels is not None:
        mapping = (
            property_labels
            if isinstance(property_labels, dict)
            else load_property_labels(property_labels)
        )
        batch.extend(mapping.items())
    insert_many(batch)
    conn.commit()
    conn.close()
    return LabelStore(out_path)


class DictLabels:
    """In-memory stand-in for LabelStore; used by tests and small runs."""

    def __init__(self, mapping: dict[str, str]):
        self._map = dict(mapping)

    def get(self, ident):
        return self._map.get(ident)

    def __contains__(self, ident):
        return ident in self._map

    def ids_for_label(self, label):
        return sorted(i for i, l in self._map.items() if l == label)

    def __len__(self):
        return len(self._map)

    def items(self):
        return iter(sorted(self._map.items()))


def sample_instances(shards: Iterable, type_id: str, k: int, chain=DEFAULT_LANGUAGE_CHAIN):
    """Up to k entities whose instance-of claims contain type_id, plus the
    total matching count. Offline replacement for a live type query."""
    if k < 1:
        raise ValueError("k must be >= 1")
    samples: list[tuple[str, str | None, str | None]] = []
    count = 0
    for shard in shards:
        for record in stream_shard(shard):
            hit = any(
                cv.datatype == ENTITY_REF and cv.payload == type_id
                for cv in record.claims.get("P31", ())
            )
            if not hit:
                continue
            count += 1
            if len(samples) < k:
                samples.append(
                    (
                        record.id,
                        resolve_label(record, chain),
                        resolve_description(record, chain),
                    )
                )
    return samples, count
