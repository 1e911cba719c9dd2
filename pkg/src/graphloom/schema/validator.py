"""Structural validation of a loaded schema.

Violations are report entries, never exceptions: the validator is also used
to screen machine-proposed schema edits, where a broken invariant is an
expected outcome that must be surfaced, not a crash.

Checked invariants:
  * gate-module synchronization: every gate value appears in at least one
    value-based indicator of some module in its own category
  * cross-category gate exclusivity: gate sets are pairwise disjoint
  * identifier format: Q/P prefix followed by digits
  * inline label annotations agree with the label store (downgraded to a
    warning when the store has no entry for the id)
  * duplicate indicators on one property within a module (warning)
  * properties shared between intrinsic and relational value_props in one
    category (warning; routing precedence sends them intrinsic)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import INTRINSIC, RELATIONAL, SchemaConfig

_ID_RE = re.compile(r"^[QP]\d+$")

SYNC = "sync"
EXCLUSIVITY = "exclusivity"
ID_FORMAT = "id-format"
LABEL_ANNOTATION = "label-annotation"
DUPLICATE_INDICATOR = "duplicate-indicator"
KIND_OVERLAP = "kind-overlap"

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Violation:
    kind: str
    severity: str
    message: str
    context: tuple[str, ...] = ()

    def as_line(self) -> str:
        ctx = " ".join(self.context)
        return f"{self.severity}\t{self.kind}\t{ctx}\t{self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def add(self, kind, severity, message, *context):
        self.violations.append(Violation(kind, severity, message, tuple(context)))

    def errors(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == ERROR]

    def is_valid(self) -> bool:
        return not self.errors()

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def as_text(self) -> str:
        return "\n".join(v.as_line() for v in self.violations)

    def as_dict(self) -> dict:
        return {
            "valid": self.is_valid(),
            "violations": [
                {
                    "kind": v.kind,
                    "severity": v.severity,
                    "context": list(v.context),
                    "message": v.message,
                }
                for v in self.violations
            ],
        }


def _iter_identifiers(schema: SchemaConfig):
    """Yield (id, context...) for every identifier position in the schema."""
    for cat in schema.categories:
        for g in cat.gate_values:
            yield g, (cat.id, "gate")
        for p in cat.core_properties:
            yield p, (cat.id, "core")
        for mod in cat.modules:
            for ind in mod.indicators:
                yield ind.property, (cat.id, mod.name, "indicator")
                for v in ind.values:
                    yield v, (cat.id, mod.name, f"indicator:{ind.property}")
            for p in mod.value_props:
                yield p, (cat.id, mod.name, "value_prop")


def validate_schema(schema: SchemaConfig, labels=None) -> ValidationReport:
    """Validate a schema; pass a LabelStore to check inline annotations."""
    report = ValidationReport()

    # gate-module synchronization
    for cat in schema.categories:
        covered = set()
        for mod in cat.modules:
            for ind in mod.indicators:
                covered.update(ind.values)
        for g in cat.gate_values:
            if g not in covered:
                report.add(
                    SYNC,
                    ERROR,
                    f"gate {g} appears in no value-based indicator of {cat.id}",
                    cat.id,
                    g,
                )

    # cross-category gate exclusivity
    seen: dict[str, str] = {}
    for cat in schema.categories:
        for g in cat.gate_values:
            if g in seen and seen[g] != cat.id:
                report.add(
                    EXCLUSIVITY,
                    ERROR,
                    f"gate {g} appears in both {seen[g]} and {cat.id}",
                    cat.id,
                    g,
                )
            else:
                seen.setdefault(g, cat.id)

    # identifier format + label annotations
    checked = set()
    for ident, ctx in _iter_identifiers(schema):
        if not _ID_RE.match(ident):
            report.add(ID_FORMAT, ERROR, f"malformed identifier {ident!r}", *ctx)
            continue
        if ident in checked:
            continue
        checked.add(ident)
        annotated = schema.annotations.get(ident)
        if labels is None:
            continue
        stored = labels.get(ident)
        if stored is None:
            # fixtures may be partial: existence check downgrades to warning
            report.add(
                LABEL_ANNOTATION,
                WARNING,
                f"{ident} not present in label store",
                *ctx,
            )
        elif annotated is None:
            report.add(
                LABEL_ANNOTATION,
                ERROR,
                f"{ident} has no inline label annotation (expected {stored!r})",
                *ctx,
            )
        elif annotated != stored:
            report.add(
                LABEL_ANNOTATION,
                ERROR,
                f"{ident} annotated {annotated!r} but label store says {stored!r}",
                *ctx,
            )

    # duplicate indicators / intrinsic-relational value_prop overlap
    for cat in schema.categories:
        for mod in cat.modules:
            props = [ind.property for ind in mod.indicators]
            for p in sorted({p for p in props if props.count(p) > 1}):
                report.add(
                    DUPLICATE_INDICATOR,
                    WARNING,
                    f"module {mod.name} declares {p} in more than one indicator",
                    cat.id,
                    mod.name,
                    p,
                )
        intrinsic_props = set()
        relational_props = set()
        for mod in cat.modules:
            target = intrinsic_props if mod.kind == INTRINSIC else relational_props
            target.update(mod.value_props)
        for p in sorted(intrinsic_props & relational_props):
            report.add(
                KIND_OVERLAP,
                WARNING,
                f"{p} is a value property of both intrinsic and relational "
                "modules; routing precedence sends it intrinsic",
                cat.id,
                p,
            )

    return report
