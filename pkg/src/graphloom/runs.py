"""Run directory plumbing: the stage manifest and the review journal.

The manifest records, per pipeline stage, a timestamp plus content digests
of the inputs it read; a stage refuses inputs whose digest drifted since
they were recorded. The review journal is a single append-only JSONL file;
replaying it rebuilds review state, which keeps the human-review trail
auditable.
"""

from __future__ import annotations

import hashlib
import json
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

MANIFEST_FILE = "run-manifest.json"
JOURNAL_FILE = "review-journal.jsonl"


def digest_path(path) -> str:
    path = Path(path)
    h = hashlib.sha256()
    if path.is_dir():
        for child in sorted(p for p in path.rglob("*") if p.is_file()):
            h.update(child.name.encode())
            h.update(child.read_bytes())
    else:
        h.update(path.read_bytes())
    return h.hexdigest()


@dataclass
class RunManifest:
    run_dir: Path
    run_id: str = ""
    schema_version: str = ""
    stages: list[dict] = field(default_factory=list)

    @classmethod
    def open(cls, run_dir) -> "RunManifest":
        run_dir = Path(run_dir)
        run_dir.mkdir(parents=True, exist_ok=True)
        path = run_dir / MANIFEST_FILE
        if path.exists():
            doc = json.loads(path.read_text(encoding="utf-8"))
            return cls(
                run_dir=run_dir,
                run_id=doc["run_id"],
                schema_version=doc.get("schema_version", ""),
                stages=doc.get("stages", []),
            )
        return cls(run_dir=run_dir, run_id=uuid.uuid4().hex[:12])

    def record_stage(self, name: str, inputs: dict, outputs: dict | None = None) -> None:
        digests = {str(k): digest_path(v) for k, v in inputs.items()}
        for key, path in digests.items():
            recorded = self._last_digest(key)
            if recorded is not None and recorded != path:
                raise ValueError(
                    f"stage {name}: input {key} changed since it was recorded "
                    "in the manifest"
                )
        self.stages.append(
            {
                "name": name,
                "timestamp": time.time(),
                "inputs": digests,
                "outputs": {str(k): str(v) for k, v in (outputs or {}).items()},
            }
        )
        self.save()

    def _last_digest(self, key: str) -> str | None:
        for stage in reversed(self.stages):
            if key in stage["inputs"]:
                return stage["inputs"][key]
        return None

    def save(self) -> None:
        doc = {
            "run_id": self.run_id,
            "schema_version": self.schema_version,
            "stages": self.stages,
        }
        (self.run_dir / MANIFEST_FILE).write_text(
            json.dumps(doc, indent=2), encoding="utf-8"
        )


class ReviewJournal:
    """Append-only review-state store keyed by decision id."""

    def __init__(self, run_dir):
        self.path = Path(run_dir) / JOURNAL_FILE

    def replay(self) -> dict[str, dict]:
        state: dict[str, dict] = {}
        if not self.path.exists():
            return state
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            entry = json.loads(line)
            state[entry["decision_id"]] = entry
        return state

    def set_state(self, decision_id: str, review_state: str, note: str = "") -> dict:
        """Idempotent by decision id: a repeat of the current state returns
        it unchanged; a real change appends and bumps the version."""
        state = self.replay()
        current = state.get(decision_id)
        if (
            current is not None
            and current["review_state"] == review_state
            and current.get("note", "") == note
        ):
            return current
        version = (current["version"] + 1) if current else 1
        entry = {
            "decision_id": decision_id,
            "review_state": review_state,
            "note": note,
            "version": version,
            "timestamp": time.time(),
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry) + "\n")
        return entry
