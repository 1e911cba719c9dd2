"""Failure partitioning after a classification pass."""

from __future__ import annotations

from dataclasses import dataclass

from ..classify import ClassStats


@dataclass(frozen=True)
class FailureSets:
    unclassified: frozenset[str]
    no_module: frozenset[str]
    r_c: float
    r_m: float

    def __post_init__(self):
        if self.unclassified & self.no_module:
            raise ValueError("an entity cannot be both unclassified and no-module")


def compute_failures(stats: ClassStats) -> FailureSets:
    """Rates follow the two-case formulas; a pass with zero classified
    entities has a module-assignment rate of 0."""
    return FailureSets(
        unclassified=frozenset(stats.unclassified_ids),
        no_module=frozenset(stats.no_module_ids),
        r_c=stats.r_c,
        r_m=stats.r_m,
    )
