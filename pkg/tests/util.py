"""Shared test helpers: dump-layout builders, random schema/entity
generators, and an independent naive evaluator used as the oracle for
equivalence tests."""

from __future__ import annotations

import gzip
import json
import random
from pathlib import Path

from graphloom.ingest import ENTITY_REF
from graphloom.schema.model import (
    CategoryDef,
    Indicator,
    ModuleDef,
    SchemaConfig,
)

FIXTURES = Path(__file__).parent.parent / "fixtures"


# --------------------------------------------------------------------------
# raw dump-layout builders (mirror the wire format, not the parsed model)

def ref(qid):
    return {"mainsnak": {"snaktype": "value",
                         "datavalue": {"type": "wikibase-entityid", "value": {"id": qid}}}}


def string(text):
    return {"mainsnak": {"snaktype": "value",
                         "datavalue": {"type": "string", "value": text}}}


def time_value(iso):
    return {"mainsnak": {"snaktype": "value",
                         "datavalue": {"type": "time", "value": {"time": iso}}}}


def quantity(amount):
    return {"mainsnak": {"snaktype": "value",
                         "datavalue": {"type": "quantity", "value": {"amount": amount}}}}


def coordinate(lat, lon):
    return {"mainsnak": {"snaktype": "value",
                         "datavalue": {"type": "globecoordinate",
                                       "value": {"latitude": lat, "longitude": lon}}}}


def dump_entity(qid, label=None, description=None, claims=None, lang="en"):
    obj = {"id": qid, "type": "item", "labels": {}, "descriptions": {}, "claims": {}}
    if label is not None:
        obj["labels"][lang] = {"language": lang, "value": label}
    if description is not None:
        obj["descriptions"]["en"] = {"language": "en", "value": description}
    for prop, statements in (claims or {}).items():
        obj["claims"][prop] = statements if isinstance(statements, list) else [statements]
    return obj


def write_shard(path, objects, compress=True):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    opener = gzip.open if compress else open
    with opener(path, "wt", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json.dumps(obj) + "\n")
    return path


# --------------------------------------------------------------------------
# randomized schema / entity generation

PROP_POOL = [f"P{100 + i}" for i in range(30)]


def random_schema(rng: random.Random, n_categories=None) -> SchemaConfig:
    """A structurally valid random schema: disjoint gates, every gate in a
    value-based indicator of its own category."""
    n_categories = n_categories or rng.randint(2, 5)
    next_q = iter(range(1000, 100000))
    categories = []
    for c in range(n_categories):
        gates = tuple(f"Q{next(next_q)}" for _ in range(rng.randint(1, 4)))
        n_modules = rng.randint(1, 4)
        # deal every gate to a random module's type indicator
        dealt = {i: [] for i in range(n_modules)}
        for g in gates:
            dealt[rng.randrange(n_modules)].append(g)
        modules = []
        for m in range(n_modules):
            indicators = []
            if dealt[m]:
                indicators.append(Indicator("P31", tuple(dealt[m])))
            for _ in range(rng.randint(0, 2)):
                indicators.append(Indicator(rng.choice(PROP_POOL)))
            if not indicators:
                indicators.append(Indicator(rng.choice(PROP_POOL)))
            modules.append(
                ModuleDef(
                    name=f"mod_{c}_{m}",
                    kind=rng.choice(["intrinsic", "relational"]),
                    indicators=tuple(indicators),
                    value_props=tuple(
                        rng.sample(PROP_POOL, rng.randint(1, 3))
                    ),
                )
            )
        categories.append(
            CategoryDef(
                id=f"cat{c}",
                gate_values=gates,
                core_properties=tuple(rng.sample(PROP_POOL, rng.randint(0, 2))),
                modules=tuple(modules),
            )
        )
    return SchemaConfig(categories=tuple(categories), version="random")


def random_dump_entity(rng: random.Random, schema: SchemaConfig, qid: str) -> dict:
    """A random raw entity whose vocabulary overlaps the schema's."""
    all_gates = [g for c in schema.categories for g in c.gate_values]
    claims = {}
    types = []
    roll = rng.random()
    if roll < 0.6:
        types = rng.sample(all_gates, rng.randint(1, min(2, len(all_gates))))
    elif roll < 0.8:
        types = [f"Q{rng.randint(200000, 210000)}"]  # unknown type
    if types:
        claims["P31"] = [ref(t) for t in types]
    for prop in rng.sample(PROP_POOL, rng.randint(0, 6)):
        values = []
        for _ in range(rng.randint(1, 2)):
            kind = rng.random()
            if kind < 0.5:
                values.append(ref(f"Q{rng.randint(1000, 210000)}"))
            elif kind < 0.75:
                values.append(string(f"text-{rng.randint(0, 999)}"))
            else:
                values.append(quantity(f"+{rng.randint(0, 10_000)}"))
        claims[prop] = values
    return dump_entity(qid, label=f"entity {qid}", claims=claims)


# --------------------------------------------------------------------------
# independent naive evaluator (deliberately dumb, no shared code paths)

def naive_types(entity) -> set[str]:
    found = set()
    for prop in ("P31", "P279"):
        for cv in entity.claims.get(prop, ()):
            if cv.datatype == ENTITY_REF:
                found.add(cv.payload)
    return found


def naive_category(entity, schema: SchemaConfig):
    types = naive_types(entity)
    for cat in schema.categories:
        if any(g in types for g in cat.gate_values):
            return cat.id
    return None


def naive_modules(entity, category: CategoryDef) -> set[str]:
    active = set()
    for mod in category.modules:
        for ind in mod.indicators:
            claims = entity.claims.get(ind.property, ())
            if not ind.values:
                if claims:
                    active.add(mod.name)
                    break
            else:
                hit = False
                for cv in claims:
                    if cv.datatype == ENTITY_REF and cv.payload in ind.values:
                        hit = True
                        break
                if hit:
                    active.add(mod.name)
                    break
    return active


def naive_bucket_of(prop, cv, category: CategoryDef, active: set[str]):
    """Bucket name (and owner) routing precedence computed the slow way."""
    if prop in category.core_properties:
        return "core", None
    for mod in category.modules:
        if mod.kind == "intrinsic" and mod.name in active and prop in mod.value_props:
            return "intrinsic", mod.name
    if cv.datatype == ENTITY_REF:
        for mod in category.modules:
            if mod.kind == "relational" and mod.name in active and prop in mod.value_props:
                return "relational", mod.name
    return "unclaimed", None


def claim_count(entity) -> int:
    return sum(len(values) for values in entity.claims.values())
