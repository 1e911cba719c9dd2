"""Structural span analysis: which module names recur across categories.

Module names are the unit of analysis: a relational module like "religion"
defined in several categories counts as one grouping with a span equal to
the number of categories carrying it. The bipartite category-module
adjacency feeds both the text report and the rendered figure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import INTRINSIC, RELATIONAL, SchemaConfig


@dataclass
class SpanReport:
    # module name -> ordered list of category ids containing it
    module_categories: dict[str, list[str]] = field(default_factory=dict)
    module_kinds: dict[str, str] = field(default_factory=dict)
    intrinsic_total: int = 0
    relational_total: int = 0

    def span(self, module: str) -> int:
        return len(self.module_categories.get(module, []))

    def spanning_at_least(self, n: int, kind: str | None = None) -> list[str]:
        names = [m for m, cats in self.module_categories.items() if len(cats) >= n]
        if kind is not None:
            names = [m for m in names if self.module_kinds[m] == kind]
        return sorted(names, key=lambda m: (-self.span(m), m))

    def adjacency(self) -> list[tuple[str, str]]:
        """(category, module) edges of the bipartite view."""
        return [
            (cat, mod)
            for mod, cats in sorted(self.module_categories.items())
            for cat in cats
        ]

    def as_lines(self) -> list[str]:
        lines = [
            f"intrinsic_groupings\t{self.intrinsic_total}",
            f"relational_groupings\t{self.relational_total}",
        ]
        for mod in sorted(
            self.module_categories, key=lambda m: (-self.span(m), m)
        ):
            cats = ",".join(self.module_categories[mod])
            lines.append(f"module\t{mod}\t{self.module_kinds[mod]}\t{self.span(mod)}\t{cats}")
        return lines

    def as_dict(self) -> dict:
        return {
            "intrinsic_groupings": self.intrinsic_total,
            "relational_groupings": self.relational_total,
            "modules": {
                m: {
                    "kind": self.module_kinds[m],
                    "span": self.span(m),
                    "categories": self.module_categories[m],
                }
                for m in sorted(self.module_categories)
            },
        }


def schema_stats(schema: SchemaConfig) -> SpanReport:
    report = SpanReport()
    for cat in schema.categories:
        for mod in cat.modules:
            report.module_categories.setdefault(mod.name, []).append(cat.id)
            # a name shared across kinds keeps the kind of its first definition
            report.module_kinds.setdefault(mod.name, mod.kind)
    report.intrinsic_total = sum(
        1 for k in report.module_kinds.values() if k == INTRINSIC
    )
    report.relational_total = sum(
        1 for k in report.module_kinds.values() if k == RELATIONAL
    )
    return report
