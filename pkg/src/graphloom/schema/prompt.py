"""Render an entity-extraction prompt straight from the schema.

Categories supply the taxonomy table (gate label annotations double as the
example entity types) and each category's relational module names supply its
tag vocabulary. The output-format and instruction blocks are fixed text.
"""

from __future__ import annotations

from .model import RELATIONAL, SchemaConfig

_OUTPUT_BLOCK = """### Output Format

Return a JSON object:
{
  "entities": [
    {
      "entity": "Albert Einstein",
      "category": "Person",
      "tags": ["education", "award"],
      "context": "mentioned as Nobel Prize-winning physicist at Princeton"
    }
  ]
}

### Instructions

1. Extract all named entities from the text
2. Classify each into exactly one category
3. Assign tags only when relevant in the given context
4. Include the context field to explain tag assignments"""


def generate_extraction_prompt(
    schema: SchemaConfig, label_map: dict[str, str]
) -> str:
    """Build the extraction prompt; label_map maps category id -> display name."""
    missing = [c.id for c in schema.categories if c.id not in label_map]
    if missing:
        raise ValueError(f"label_map missing categories: {missing}")

    lines = [
        "You are an entity extraction system. Given a text passage, extract "
        "all named entities and classify each one into a category, then "
        "assign relevant tags.",
        "",
        "### Entity Categories",
        "",
        "Use the following taxonomy to classify each extracted entity:",
        "",
    ]

    rows = []
    for cat in schema.categories:
        examples = [
            schema.annotations[g] for g in cat.gate_values if g in schema.annotations
        ]
        rows.append((label_map[cat.id], ", ".join(examples[:5])))
    name_w = max(len("Category"), max(len(r[0]) for r in rows))
    lines.append(f"| {'Category'.ljust(name_w)} | Entity Types (examples) |")
    lines.append(f"|{'-' * (name_w + 2)}|-------------------------|")
    for name, examples in rows:
        lines.append(f"| {name.ljust(name_w)} | {examples} |")

    lines += [
        "",
        "### Tags",
        "",
        "For each category, assign tags from the list below if relevant to "
        "that entity under the original context -- not based on general "
        "world knowledge.",
        "",
    ]
    for cat in schema.categories:
        tags = [m.name for m in cat.modules if m.kind == RELATIONAL]
        lines.append(f"- {label_map[cat.id]}: {', '.join(tags)}")

    lines += ["", _OUTPUT_BLOCK]
    return "\n".join(lines)
