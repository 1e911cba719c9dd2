"""HTTP+JSON API over a run directory; the dashboard's only data source.

Every read endpoint is a pure view over persisted run-dir artifacts, so
restarting the service reproduces identical responses. Review writes go
through the append-only journal; reclassification runs as a background job
with status polling, at most one at a time.
"""

from __future__ import annotations

import json
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .classify import classify_shards, read_stats
from .cleaning import load_core_ids
from .ingest import LabelStore
from .refine.candidates import candidate_types
from .refine.failures import compute_failures
from .refine.loop import RefinementRound, _persist_round
from .refine.oracle import ACCEPTED, ANNOTATED, OracleDecision, decisions_to_diff
from .runs import ReviewJournal
from .schema import apply_diff, load_schema, schema_stats, serialize_schema, validate_schema

API_PREFIX = "/api/v1"
REVIEW_STATES = {"accepted", "rejected", "annotated", "pending"}


class ReviewRequest(BaseModel):
    state: str
    note: str = ""


class _JobRegistry:
    def __init__(self):
        self._lock = threading.Lock()
        self.jobs: dict[str, dict] = {}
        self.active: str | None = None

    def start(self, target) -> str | None:
        with self._lock:
            if self.active is not None and self.jobs[self.active]["status"] == "running":
                return None
            job_id = uuid.uuid4().hex[:12]
            self.jobs[job_id] = {"job_id": job_id, "status": "running", "detail": ""}
            self.active = job_id

        def run():
            try:
                detail = target()
                self.jobs[job_id].update(status="done", detail=detail)
            except Exception as exc:  # surfaced via polling, not a crash
                self.jobs[job_id].update(status="failed", detail=str(exc))

        threading.Thread(target=run, daemon=True).start()
        return job_id


def create_app(
    run_dir,
    schema_dir,
    shards_dir=None,
    labels_path=None,
    core_ids_path=None,
    frontend_dir=None,
) -> FastAPI:
    run_dir = Path(run_dir)
    schema_dir = Path(schema_dir)
    classified_dir = run_dir / "classified"
    journal = ReviewJournal(run_dir)
    jobs = _JobRegistry()
    app = FastAPI(title="graphloom service")

    def labels():
        return LabelStore(labels_path) if labels_path else None

    def rounds_on_disk() -> list[dict]:
        rounds_dir = run_dir / "rounds"
        if not rounds_dir.exists():
            return []
        return [
            json.loads(p.read_text(encoding="utf-8"))
            for p in sorted(rounds_dir.glob("round-*.json"))
        ]

    def decisions_view() -> list[dict]:
        """Latest round's decisions overlaid with journal review state."""
        rounds = rounds_on_disk()
        if not rounds:
            return []
        state = journal.replay()
        out = []
        for doc in rounds[-1]["decisions"]:
            entry = state.get(doc["decision_id"])
            merged = dict(doc)
            merged["round_index"] = rounds[-1]["index"]
            merged["version"] = entry["version"] if entry else 0
            if entry:
                merged["review_state"] = entry["review_state"]
                merged["note"] = entry.get("note", "")
            out.append(merged)
        return out

    @app.get(f"{API_PREFIX}/coverage")
    def coverage():
        if not (classified_dir / "class-stats.json").exists():
            raise HTTPException(404, "no classification pass in this run dir")
        return read_stats(classified_dir).as_dict()

    @app.get(f"{API_PREFIX}/failures")
    def failures():
        stats = read_stats(classified_dir)
        fs = compute_failures(stats)
        return {
            "unclassified": sorted(fs.unclassified),
            "no_module": sorted(fs.no_module),
            "r_c": fs.r_c,
            "r_m": fs.r_m,
        }

    @app.get(f"{API_PREFIX}/candidates")
    def candidates(k_freq: int = 20, k_hub: int = 20):
        found = candidate_types(classified_dir, k_freq, k_hub, labels=labels())
        return [c.as_dict() for c in found]

    @app.get(f"{API_PREFIX}/rounds")
    def rounds():
        return rounds_on_disk()

    @app.get(f"{API_PREFIX}/span")
    def span():
        return schema_stats(load_schema(schema_dir)).as_dict()

    @app.get(f"{API_PREFIX}/validation")
    def validation():
        return validate_schema(load_schema(schema_dir), labels()).as_dict()

    @app.get(f"{API_PREFIX}/decisions")
    def decisions():
        return decisions_view()

    @app.post(f"{API_PREFIX}/decisions/{{decision_id}}/review")
    def review(decision_id: str, body: ReviewRequest):
        if body.state not in REVIEW_STATES:
            raise HTTPException(422, f"unknown review state {body.state!r}")
        known = {d["decision_id"] for d in decisions_view()}
        if decision_id not in known:
            raise HTTPException(404, f"unknown decision {decision_id!r}")
        return journal.set_state(decision_id, body.state, body.note)

    @app.post(f"{API_PREFIX}/reclassify")
    def reclassify():
        accepted_docs = [
            d for d in decisions_view() if d["review_state"] in (ACCEPTED, ANNOTATED)
            and d["verdict"] in ("assign", "module-edit") and d["invalid_reason"] is None
        ]
        if not accepted_docs:
            return JSONResponse(
                {"error": "no accepted decisions to apply"}, status_code=409
            )
        if shards_dir is None:
            raise HTTPException(409, "service started without --shards; cannot reclassify")

        all_rounds = rounds_on_disk()
        next_index = (all_rounds[-1]["index"] + 1) if all_rounds else 0

        def job():
            schema = load_schema(schema_dir)
            decisions = [
                OracleDecision.from_dict(
                    {k: v for k, v in d.items() if k not in ("version", "round_index")}
                )
                for d in accepted_docs
            ]
            diff = decisions_to_diff(decisions, schema)
            new_schema = apply_diff(schema, diff)
            report = validate_schema(new_schema)
            if not report.is_valid():
                raise ValueError(
                    "diff fails validation: "
                    + "; ".join(v.message for v in report.errors()[:5])
                )
            serialize_schema(new_schema, schema_dir)
            shards = sorted(Path(shards_dir).glob("*.jsonl*"))
            core = load_core_ids(core_ids_path) if core_ids_path else None
            before = compute_failures(read_stats(classified_dir))
            _, stats = classify_shards(shards, core, new_schema, labels(), classified_dir)
            after = compute_failures(stats)
            round_ = RefinementRound(
                index=next_index,
                before=before,
                after=after,
                decisions=decisions,
                diff=diff,
            )
            _persist_round(run_dir, round_)
            return f"applied {len(diff.added_gates)} gate additions, r_c={after.r_c:.4f}"

        job_id = jobs.start(job)
        if job_id is None:
            return JSONResponse(
                {"error": "a reclassification job is already running"},
                status_code=409,
            )
        return {"job_id": job_id, "status": "running"}

    @app.get(f"{API_PREFIX}/jobs/{{job_id}}")
    def job_status(job_id: str):
        if job_id not in jobs.jobs:
            raise HTTPException(404, f"unknown job {job_id!r}")
        return jobs.jobs[job_id]

    if frontend_dir and Path(frontend_dir).exists():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="dashboard")

    return app
