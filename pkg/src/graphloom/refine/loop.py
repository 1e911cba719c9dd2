"""The refinement loop: classify, analyze failures, consult oracles, apply
the accepted diff, validate, reclassify; stop at the coverage targets, at
max_rounds, or when a round produces no accepted decisions.

After-rates always come from a real reclassification pass, never
extrapolation. A diff that breaks validation rolls the whole round back.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..classify import classify_shards
from ..schema.diff import apply_diff
from ..schema.validator import validate_schema
from ..schema.model import SchemaConfig, SchemaDiff
from .candidates import candidate_types
from .failures import FailureSets, compute_failures
from .oracle import ACCEPTED, OracleDecision, consult_oracles, decisions_to_diff


@dataclass
class RefinementRound:
    index: int
    before: FailureSets
    after: FailureSets | None
    candidates: list = field(default_factory=list)
    decisions: list[OracleDecision] = field(default_factory=list)
    diff: SchemaDiff | None = None
    theta_c: float = 0.9
    theta_m: float = 0.9
    aborted: str | None = None

    def as_dict(self) -> dict:
        def fs(f: FailureSets | None):
            if f is None:
                return None
            return {
                "unclassified": sorted(f.unclassified),
                "no_module": sorted(f.no_module),
                "r_c": f.r_c,
                "r_m": f.r_m,
            }

        diff = None
        if self.diff is not None:
            diff = {
                "added_gates": [
                    {"category": g.category, "type_id": g.type_id, "module": g.module}
                    for g in self.diff.added_gates
                ],
                "indicator_edits": [
                    {
                        "category": e.category,
                        "module": e.module,
                        "property": e.property,
                        "added_values": list(e.added_values),
                    }
                    for e in self.diff.indicator_edits
                ],
                "module_edits": [
                    {"action": e.action, "category": e.category, "module": e.name()}
                    for e in self.diff.module_edits
                ],
            }
        return {
            "index": self.index,
            "before": fs(self.before),
            "after": fs(self.after),
            "candidates": [c.as_dict() for c in self.candidates],
            "decisions": [d.as_dict() for d in self.decisions],
            "diff": diff,
            "theta_c": self.theta_c,
            "theta_m": self.theta_m,
            "aborted": self.aborted,
        }


def _persist_round(run_dir, round_: RefinementRound) -> None:
    if run_dir is None:
        return
    rounds_dir = Path(run_dir) / "rounds"
    rounds_dir.mkdir(parents=True, exist_ok=True)
    path = rounds_dir / f"round-{round_.index:03d}.json"
    path.write_text(json.dumps(round_.as_dict(), indent=2), encoding="utf-8")


def refine(
    shards,
    core_ids,
    schema: SchemaConfig,
    oracle,
    theta_c: float = 0.9,
    theta_m: float = 0.9,
    max_rounds: int = 10,
    labels=None,
    k_freq: int = 20,
    k_hub: int = 20,
    run_dir=None,
    reviewer=None,
    out_dir=None,
) -> tuple[SchemaConfig, list[RefinementRound]]:
    """Run the loop from a valid seed schema.

    ``reviewer`` is called with each round's decision list and may flip
    review states; the default accepts every valid non-declined decision
    (scripted/CI behavior). Pass an interactive reviewer to gate on a human.
    """
    if not validate_schema(schema).is_valid():
        raise ValueError("seed schema fails validation")
    if reviewer is None:
        def reviewer(decisions):
            for d in decisions:
                if d.valid and d.verdict in ("assign", "module-edit"):
                    d.review_state = ACCEPTED

    shards = sorted(Path(s) for s in shards)
    scratch = Path(run_dir) / "classified" if run_dir else out_dir
    if scratch is None:
        raise ValueError("refine needs run_dir or out_dir for classified output")

    _, stats = classify_shards(shards, core_ids, schema, labels, scratch)
    failures = compute_failures(stats)
    rounds: list[RefinementRound] = []

    round_index = 0
    while (failures.r_c < theta_c or failures.r_m < theta_m) and round_index < max_rounds:
        candidates = candidate_types(scratch, k_freq, k_hub, labels=labels)
        round_ = RefinementRound(
            index=round_index,
            before=failures,
            after=None,
            candidates=candidates,
            theta_c=theta_c,
            theta_m=theta_m,
        )
        if not candidates:
            round_.aborted = "no-candidates"
            rounds.append(round_)
            _persist_round(run_dir, round_)
            break

        decisions = consult_oracles(
            candidates, schema, oracle, labels=labels, round_index=round_index
        )
        reviewer(decisions)
        round_.decisions = decisions
        accepted = [d for d in decisions if d.actionable()]
        if not accepted:
            round_.aborted = "no-accepted-decisions"
            rounds.append(round_)
            _persist_round(run_dir, round_)
            break

        diff = decisions_to_diff(accepted, schema)
        round_.diff = diff
        try:
            new_schema = apply_diff(schema, diff)
        except Exception as exc:  # rejected diff: whole-round rollback
            round_.aborted = f"diff-rejected:{exc}"
            rounds.append(round_)
            _persist_round(run_dir, round_)
            break
        report = validate_schema(new_schema)
        if not report.is_valid():
            round_.aborted = "validation-failed:" + "; ".join(
                v.message for v in report.errors()[:5]
            )
            rounds.append(round_)
            _persist_round(run_dir, round_)
            break

        schema = new_schema
        _, stats = classify_shards(shards, core_ids, schema, labels, scratch)
        failures = compute_failures(stats)
        round_.after = failures
        rounds.append(round_)
        _persist_round(run_dir, round_)
        round_index += 1

    return schema, rounds
