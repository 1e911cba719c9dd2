"""Applying schema diffs: gate additions, indicator edits, module edits.

apply_diff is pure: the input schema is never mutated. Gate additions are
auto-synchronized so the sync invariant survives the edit: the new gate
value is inserted into a value-based indicator on a type-assertion property
of the routed module, creating one when the module has none. Preference
order for reuse: an existing value-based P31 indicator, then P279, then any
value-based type-assertion indicator in declaration order.
"""

from __future__ import annotations

from dataclasses import replace

from .model import (
    TYPE_ASSERTION_PROPERTIES,
    CategoryDef,
    Indicator,
    ModuleDef,
    SchemaConfig,
    SchemaDiff,
    SchemaError,
)


class DiffError(SchemaError):
    """Diff references a category or module that does not exist."""


def _require_category(schema: SchemaConfig, cat_id: str) -> CategoryDef:
    cat = schema.category(cat_id)
    if cat is None:
        raise DiffError(f"diff references unknown category {cat_id!r}")
    return cat


def _require_module(cat: CategoryDef, name: str) -> ModuleDef:
    mod = cat.module(name)
    if mod is None:
        raise DiffError(f"diff references unknown module {cat.id}/{name!r}")
    return mod


def _sync_indicator_target(mod: ModuleDef) -> Indicator | None:
    """Pick the value-based type-assertion indicator a new gate joins."""
    for prop in TYPE_ASSERTION_PROPERTIES:
        for ind in mod.indicators:
            if ind.property == prop and ind.values:
                return ind
    for ind in mod.indicators:
        if ind.property in TYPE_ASSERTION_PROPERTIES and ind.values:
            return ind
    return None


def _add_value_to_module(mod: ModuleDef, value: str) -> ModuleDef:
    target = _sync_indicator_target(mod)
    if target is None:
        new_ind = Indicator(property=TYPE_ASSERTION_PROPERTIES[0], values=(value,))
        return replace(mod, indicators=mod.indicators + (new_ind,))
    if value in target.values:
        return mod
    new_inds = tuple(
        replace(ind, values=ind.values + (value,)) if ind is target else ind
        for ind in mod.indicators
    )
    return replace(mod, indicators=new_inds)


def _default_sync_module(cat: CategoryDef) -> ModuleDef:
    """Without an explicit route, prefer a module that already has a
    value-based type-assertion indicator; fall back to declaration order."""
    for mod in cat.modules:
        if _sync_indicator_target(mod) is not None:
            return mod
    if not cat.modules:
        raise DiffError(f"category {cat.id} has no modules to synchronize a gate into")
    return cat.modules[0]


def _replace_module(cat: CategoryDef, mod: ModuleDef) -> CategoryDef:
    mods = tuple(mod if m.name == mod.name else m for m in cat.modules)
    return replace(cat, modules=mods)


def apply_diff(schema: SchemaConfig, diff: SchemaDiff) -> SchemaConfig:
    """Return a new schema with the diff applied; the input is unchanged."""
    out = schema

    for edit in diff.module_edits:
        cat = _require_category(out, edit.category)
        if edit.action == "create":
            if edit.module is None:
                raise DiffError("module create edit carries no definition")
            if cat.module(edit.module.name) is not None:
                raise DiffError(
                    f"module {cat.id}/{edit.module.name} already exists"
                )
            out = out.with_category(
                replace(cat, modules=cat.modules + (edit.module,))
            )
        elif edit.action == "delete":
            _require_module(cat, str(edit.module_name))
            mods = tuple(m for m in cat.modules if m.name != edit.module_name)
            out = out.with_category(replace(cat, modules=mods))
        else:
            raise DiffError(f"unknown module edit action {edit.action!r}")

    for edit in diff.indicator_edits:
        cat = _require_category(out, edit.category)
        mod = _require_module(cat, edit.module)
        existing = None
        for ind in mod.indicators:
            if ind.property == edit.property and ind.values:
                existing = ind
                break
        if existing is None:
            new_mod = replace(
                mod,
                indicators=mod.indicators
                + (Indicator(edit.property, tuple(edit.added_values)),),
            )
        else:
            added = tuple(v for v in edit.added_values if v not in existing.values)
            new_mod = replace(
                mod,
                indicators=tuple(
                    replace(i, values=i.values + added) if i is existing else i
                    for i in mod.indicators
                ),
            )
        out = out.with_category(_replace_module(cat, new_mod))

    for gate in diff.added_gates:
        cat = _require_category(out, gate.category)
        if gate.module is not None:
            mod = _require_module(cat, gate.module)
        else:
            mod = _default_sync_module(cat)
        new_mod = _add_value_to_module(mod, gate.type_id)
        cat = _replace_module(cat, new_mod)
        if gate.type_id not in cat.gate_values:
            cat = replace(cat, gate_values=cat.gate_values + (gate.type_id,))
        out = out.with_category(cat)

    return out
