"""Post-pass analysis: per-category type tables and the external label
agreement audit."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import polars as pl

from ..classify import read_classified
from ..schema.model import SchemaConfig
from .candidates import _entity_types


@dataclass
class AnalysisReport:
    total: int = 0
    classified: int = 0
    per_category: dict[str, int] = field(default_factory=dict)
    # category -> type id -> count
    type_frequency: dict[str, dict[str, int]] = field(default_factory=dict)
    # type id -> module -> count (within the type's category)
    type_module_crosstab: dict[str, dict[str, int]] = field(default_factory=dict)
    no_module_ids: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "classified": self.classified,
            "per_category": dict(sorted(self.per_category.items())),
            "type_frequency": {
                c: dict(sorted(t.items(), key=lambda kv: (-kv[1], kv[0])))
                for c, t in sorted(self.type_frequency.items())
            },
            "type_module_crosstab": {
                t: dict(sorted(m.items()))
                for t, m in sorted(self.type_module_crosstab.items())
            },
            "no_module_ids": sorted(self.no_module_ids),
        }

    def as_lines(self) -> list[str]:
        lines = [f"total\t{self.total}", f"classified\t{self.classified}"]
        for cat in sorted(self.per_category):
            lines.append(f"category\t{cat}\t{self.per_category[cat]}")
        for cat, types in sorted(self.type_frequency.items()):
            for t, n in sorted(types.items(), key=lambda kv: (-kv[1], kv[0])):
                lines.append(f"type\t{cat}\t{t}\t{n}")
        for ident in sorted(self.no_module_ids):
            lines.append(f"no_module\t{ident}")
        return lines


def category_analysis(classified_dir, schema: SchemaConfig) -> AnalysisReport:
    """Coverage per category, type-frequency tables, type x module
    cross-tab, and the explicit no-module entity report."""
    report = AnalysisReport()
    frame = read_classified(classified_dir)
    # every category gets a row, even when empty
    for cat in schema.categories:
        report.per_category[cat.id] = 0
        report.type_frequency[cat.id] = {}
    for row in frame.iter_rows(named=True):
        report.total += 1
        cat = row["category"]
        if cat is None:
            continue
        report.classified += 1
        report.per_category[cat] = report.per_category.get(cat, 0) + 1
        mods = row["intrinsic_modules"] + row["relational_modules"]
        if not mods:
            report.no_module_ids.append(row["id"])
        for t in _entity_types(row):
            freq = report.type_frequency.setdefault(cat, {})
            freq[t] = freq.get(t, 0) + 1
            cross = report.type_module_crosstab.setdefault(t, {})
            for mod in mods:
                cross[mod] = cross.get(mod, 0) + 1
    return report


@dataclass
class AgreementReport:
    agree: int = 0
    disagree: int = 0
    unclassified: int = 0  # mapped entity with no gate match: cannot evaluate
    uncovered: int = 0  # external id absent from the classified output
    # (category, external label) -> count
    confusion: dict[tuple[str, str], int] = field(default_factory=dict)

    @property
    def agreement_rate(self) -> float:
        evaluated = self.agree + self.disagree
        return self.agree / evaluated if evaluated else 0.0

    def as_dict(self) -> dict:
        return {
            "agree": self.agree,
            "disagree": self.disagree,
            "unclassified": self.unclassified,
            "uncovered": self.uncovered,
            "agreement_rate": self.agreement_rate,
            "confusion": {
                f"{cat}|{ext}": n
                for (cat, ext), n in sorted(self.confusion.items())
            },
        }


def agreement_audit(
    classified_dir,
    external_labels: dict[str, str],
    mapping: dict[str, set[str]],
) -> AgreementReport:
    """Compare schema categories against any external labeling. ``mapping``
    says which external labels each category is allowed to align with."""
    frame = read_classified(classified_dir)
    by_id = {
        row["id"]: row["category"]
        for row in frame.select(["id", "category"]).iter_rows(named=True)
    }
    report = AgreementReport()
    for ident, ext_label in external_labels.items():
        if ident not in by_id:
            report.uncovered += 1
            continue
        category = by_id[ident]
        if category is None:
            report.unclassified += 1
            continue
        allowed = mapping.get(category, set())
        if ext_label in allowed:
            report.agree += 1
        else:
            report.disagree += 1
        key = (category, ext_label)
        report.confusion[key] = report.confusion.get(key, 0) + 1
    return report
