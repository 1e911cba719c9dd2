"""Decision oracles for schema refinement.

An oracle answers one candidate type at a time: assign it to a category
(and module), propose a module edit, or decline. Three endpoint flavors:

* ScriptedOracle: a static YAML/JSON answer file, for CI and replays.
* ProcessOracle: an external process speaking line-delimited JSON over
  stdin/stdout (one request line per candidate, one response line back).
* InteractiveOracle: console prompts.

Every identifier an oracle references must exist in the label store;
fabricated ids mark the decision invalid and keep it out of the diff. This
grounding check is the anti-hallucination gate: decisions carry only
evidence pulled from the store and the dump, never the oracle's free text.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..schema.model import (
    GateAddition,
    Indicator,
    ModuleDef,
    ModuleEdit,
    SchemaConfig,
    SchemaDiff,
    SchemaError,
)
from .candidates import CandidateType

VERDICT_ASSIGN = "assign"
VERDICT_MODULE_EDIT = "module-edit"
VERDICT_DECLINE = "decline"
VERDICT_UNDECIDED = "undecided"

PENDING = "pending"
ACCEPTED = "accepted"
REJECTED = "rejected"
ANNOTATED = "annotated"


class OracleError(Exception):
    pass


@dataclass
class OracleDecision:
    decision_id: str
    subject: str
    verdict: str
    category: str | None = None
    module: str | None = None
    new_module: dict | None = None
    rationale: str = ""
    review_state: str = PENDING
    note: str = ""
    invalid_reason: str | None = None
    evidence: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.invalid_reason is None

    def actionable(self) -> bool:
        return (
            self.valid
            and self.verdict in (VERDICT_ASSIGN, VERDICT_MODULE_EDIT)
            and self.review_state in (ACCEPTED, ANNOTATED)
        )

    def as_dict(self) -> dict:
        return {
            "decision_id": self.decision_id,
            "subject": self.subject,
            "verdict": self.verdict,
            "category": self.category,
            "module": self.module,
            "new_module": self.new_module,
            "rationale": self.rationale,
            "review_state": self.review_state,
            "note": self.note,
            "invalid_reason": self.invalid_reason,
            "evidence": self.evidence,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "OracleDecision":
        return cls(**doc)


def build_request(candidate: CandidateType, schema: SchemaConfig) -> dict:
    return {
        "type_id": candidate.type_id,
        "label": candidate.label,
        "unclassified_count": candidate.unclassified_count,
        "inbound_reference_count": candidate.inbound_reference_count,
        "samples": [list(s) for s in candidate.samples],
        "categories": schema.category_ids(),
        "modules": {
            c.id: [m.name for m in c.modules] for c in schema.categories
        },
    }


class ScriptedOracle:
    """Answers from a static file mapping type id -> response object."""

    def __init__(self, path_or_mapping):
        if isinstance(path_or_mapping, dict):
            self.answers = path_or_mapping
        else:
            text = Path(path_or_mapping).read_text(encoding="utf-8")
            self.answers = yaml.safe_load(text) or {}

    def decide(self, request: dict) -> dict:
        answer = self.answers.get(request["type_id"])
        if answer is None:
            return {"verdict": VERDICT_DECLINE, "rationale": "no scripted answer"}
        if isinstance(answer, str):
            return {"verdict": answer}
        return dict(answer)


class ProcessOracle:
    """Line-delimited JSON request/response over a child process."""

    def __init__(self, command: list[str] | str, timeout: float = 30.0):
        self.command = command if isinstance(command, list) else command.split()
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None

    def _ensure(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        return self._proc

    def decide(self, request: dict) -> dict:
        proc = self._ensure()
        try:
            proc.stdin.write(json.dumps(request) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise OracleError(f"oracle process failed: {exc}") from exc
        if not line:
            raise OracleError("oracle process closed its stdout")
        try:
            response = json.loads(line)
        except ValueError as exc:
            raise OracleError(f"oracle protocol violation: {line!r}") from exc
        if not isinstance(response, dict) or "verdict" not in response:
            raise OracleError(f"oracle response missing verdict: {response!r}")
        return response

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=5)


class InteractiveOracle:
    """Console prompts; category/module entered by the operator."""

    def decide(self, request: dict) -> dict:  # pragma: no cover - interactive
        print(f"\ncandidate type {request['type_id']} ({request['label']})")
        print(
            f"  unclassified instances: {request['unclassified_count']}"
            f"  inbound references: {request['inbound_reference_count']}"
        )
        for sample in request["samples"]:
            print(f"  sample: {sample}")
        category = input(f"category {request['categories']} (empty=decline): ").strip()
        if not category:
            return {"verdict": VERDICT_DECLINE}
        module = input("module (empty=auto): ").strip() or None
        return {"verdict": VERDICT_ASSIGN, "category": category, "module": module}


def _iter_decision_identifiers(decision: OracleDecision):
    yield decision.subject
    if decision.new_module:
        for prop, values in (decision.new_module.get("indicators") or {}).items():
            yield prop
            for v in values or []:
                yield v
        for prop in decision.new_module.get("value_props") or []:
            yield prop


def _ground(decision: OracleDecision, schema: SchemaConfig, labels) -> None:
    """Mark the decision invalid unless every referenced identifier exists
    in the label store and category/module references exist in the schema."""
    if decision.verdict not in (VERDICT_ASSIGN, VERDICT_MODULE_EDIT):
        return
    if labels is not None:
        for ident in _iter_decision_identifiers(decision):
            if labels.get(ident) is None:
                decision.invalid_reason = f"invalid-identifier:{ident}"
                return
    if decision.verdict == VERDICT_ASSIGN:
        cat = schema.category(decision.category or "")
        if cat is None:
            decision.invalid_reason = f"unknown-category:{decision.category}"
            return
        if decision.module is not None and cat.module(decision.module) is None and not decision.new_module:
            decision.invalid_reason = f"unknown-module:{decision.module}"
            return
        for other in schema.categories:
            if other.id != cat.id and decision.subject in other.gate_set():
                # exclusivity guard: the type is already gated elsewhere
                decision.invalid_reason = f"already-gated:{other.id}"
                return


def consult_oracles(
    candidates: list[CandidateType],
    schema: SchemaConfig,
    oracle,
    labels=None,
    round_index: int = 0,
) -> list[OracleDecision]:
    """One decision per candidate; timeouts and protocol violations leave
    the candidate undecided and the loop moving."""
    decisions = []
    for candidate in candidates:
        request = build_request(candidate, schema)
        decision = OracleDecision(
            decision_id=f"r{round_index}-{candidate.type_id}",
            subject=candidate.type_id,
            verdict=VERDICT_UNDECIDED,
            evidence={
                "label": candidate.label,
                "unclassified_count": candidate.unclassified_count,
                "inbound_reference_count": candidate.inbound_reference_count,
                "samples": [list(s) for s in candidate.samples],
            },
        )
        try:
            response = oracle.decide(request)
        except (OracleError, subprocess.TimeoutExpired) as exc:
            decision.rationale = f"oracle unavailable: {exc}"
            decisions.append(decision)
            continue
        decision.verdict = str(response.get("verdict", VERDICT_UNDECIDED))
        decision.category = response.get("category")
        decision.module = response.get("module")
        decision.new_module = response.get("new_module")
        decision.rationale = str(response.get("rationale", ""))
        _ground(decision, schema, labels)
        decisions.append(decision)
    return decisions


def decisions_to_diff(decisions: list[OracleDecision], schema: SchemaConfig) -> SchemaDiff:
    """Fold accepted, valid decisions into one schema diff. Declined and
    invalid decisions contribute nothing."""
    gates: list[GateAddition] = []
    module_edits: list[ModuleEdit] = []
    created: set[tuple[str, str]] = set()
    for decision in decisions:
        if not decision.actionable():
            continue
        if decision.new_module:
            spec = decision.new_module
            try:
                module = ModuleDef(
                    name=str(spec["name"]),
                    kind=str(spec.get("kind", "relational")),
                    indicators=tuple(
                        Indicator(str(p), tuple(str(v) for v in (vals or [])))
                        for p, vals in (spec.get("indicators") or {"P31": []}).items()
                    ),
                    value_props=tuple(str(p) for p in spec.get("value_props") or []),
                )
            except (KeyError, SchemaError) as exc:
                decision.invalid_reason = f"bad-module-definition:{exc}"
                continue
            key = (str(decision.category), module.name)
            if key not in created:
                created.add(key)
                module_edits.append(
                    ModuleEdit(action="create", category=str(decision.category), module=module)
                )
            if decision.verdict == VERDICT_ASSIGN:
                gates.append(
                    GateAddition(str(decision.category), decision.subject, module.name)
                )
        elif decision.verdict == VERDICT_ASSIGN:
            gates.append(
                GateAddition(str(decision.category), decision.subject, decision.module)
            )
    return SchemaDiff(added_gates=tuple(gates), module_edits=tuple(module_edits))
