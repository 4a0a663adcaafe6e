"""Schema-evolution compatibility and version diffing.

Compatibility is defined by row subsumption, not a syntactic rule list:
``backward`` holds when every row valid under the old contract stays valid
under the new one, ``forward`` is the converse, ``full`` is both.  Because
contracts reject unknown row keys, removing a field is itself a backward
break (rows carrying the removed key become unknown), and adding a field is
only safe when it is nullable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ContractForgeError
from .model import Contract, FieldSpec
from .validation import value_conforms

COMPATIBILITY_MODES = ("none", "backward", "forward", "full")


@dataclass
class CompatibilityVerdict:
    compatible: bool
    reasons: list[str] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {"compatible": self.compatible, "reasons": list(self.reasons)}


def _bounds(spec: FieldSpec) -> tuple[float | None, float | None]:
    if spec.constraints is None:
        return None, None
    return spec.constraints.min_value, spec.constraints.max_value


def _value_set_reasons(name: str, narrow: FieldSpec, wide: FieldSpec) -> list[str]:
    """Why the non-null values of ``narrow`` are not all accepted by ``wide``."""
    ta, tb = narrow.logical_type, wide.logical_type
    if tb == "string":
        return []
    if ta == "enum_string":
        values = (narrow.constraints.allowed_values or []) if narrow.constraints else []
        rejected = sorted(v for v in values if not value_conforms(wide, v))
        if rejected:
            return [f"field {name!r}: allowed values {rejected} are not accepted any more"]
        return []
    if tb == "enum_string":
        return [f"field {name!r}: type {ta} narrowed to a fixed value set"]
    if ta != tb and not (ta == "integer" and tb == "number"):
        return [f"field {name!r}: values of type {ta} are not all accepted as {tb}"]
    lo_a, hi_a = _bounds(narrow)
    lo_b, hi_b = _bounds(wide)
    narrowed = []
    if lo_b is not None and (lo_a is None or lo_a < lo_b):
        narrowed.append(f"lower bound {lo_b}")
    if hi_b is not None and (hi_a is None or hi_a > hi_b):
        narrowed.append(f"upper bound {hi_b}")
    if narrowed:
        return [f"field {name!r}: numeric range narrowed ({', '.join(narrowed)})"]
    return []


def _subsumption_reasons(old: Contract, new: Contract) -> list[str]:
    """Why some row valid under ``old`` would be rejected by ``new``."""
    old_fields = {f.name.strip(): f for f in old.fields}
    new_fields = {f.name.strip(): f for f in new.fields}
    reasons: list[str] = []
    for name in old_fields:
        if name not in new_fields:
            reasons.append(f"field {name!r} removed; rows carrying it become unknown")
    for name, spec in new_fields.items():
        if name not in old_fields and not spec.nullable:
            reasons.append(f"added field {name!r} is non-nullable; rows without it fail")
    for name, old_spec in old_fields.items():
        new_spec = new_fields.get(name)
        if new_spec is None:
            continue
        if old_spec.nullable and not new_spec.nullable:
            reasons.append(f"field {name!r}: nullable narrowed to non-nullable")
        reasons.extend(_value_set_reasons(name, old_spec, new_spec))
    return reasons


def check_compatibility(old: Contract, new: Contract,
                        mode: str = "backward") -> CompatibilityVerdict:
    """Decide compatibility under the given mode, naming offending fields."""
    if mode not in COMPATIBILITY_MODES:
        raise ContractForgeError(f"unknown compatibility mode {mode!r}")
    if mode == "none":
        return CompatibilityVerdict(True, [])
    reasons: list[str] = []
    if mode in ("backward", "full"):
        reasons.extend(_subsumption_reasons(old, new))
    if mode in ("forward", "full"):
        prefix = "forward: " if mode == "full" else ""
        reasons.extend(prefix + r for r in _subsumption_reasons(new, old))
    return CompatibilityVerdict(compatible=not reasons, reasons=reasons)


@dataclass
class ContractDiff:
    added_fields: list[str] = field(default_factory=list)
    removed_fields: list[str] = field(default_factory=list)
    retyped: list[dict] = field(default_factory=list)
    constraint_changes: list[dict] = field(default_factory=list)
    rule_changes: list[str] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (self.added_fields or self.removed_fields or self.retyped
                    or self.constraint_changes or self.rule_changes)

    def to_doc(self) -> dict:
        return {
            "added_fields": list(self.added_fields),
            "removed_fields": list(self.removed_fields),
            "retyped": [dict(r) for r in self.retyped],
            "constraint_changes": [dict(c) for c in self.constraint_changes],
            "rule_changes": list(self.rule_changes),
        }


def _constraints_doc(spec: FieldSpec) -> dict:
    if spec.constraints is None:
        return {}
    return spec.constraints.to_doc()


def _rule_key(doc: dict) -> tuple:
    import json

    return (doc["column"], doc["kind"], json.dumps(doc, sort_keys=True))


def _diff_rules(old: Contract, new: Contract) -> list[str]:
    old_docs = [r.to_doc() for r in old.rules]
    new_docs = [r.to_doc() for r in new.rules]
    if old_docs == new_docs:
        return []
    changes: list[str] = []
    old_by_slot: dict[tuple, list[dict]] = {}
    new_by_slot: dict[tuple, list[dict]] = {}
    for doc in old_docs:
        old_by_slot.setdefault((doc["column"], doc["kind"]), []).append(doc)
    for doc in new_docs:
        new_by_slot.setdefault((doc["column"], doc["kind"]), []).append(doc)
    for slot in sorted(set(old_by_slot) | set(new_by_slot)):
        column, kind = slot
        before, after = old_by_slot.get(slot, []), new_by_slot.get(slot, [])
        if not after:
            changes.append(f"removed rule {kind} on {column!r}")
        elif not before:
            changes.append(f"added rule {kind} on {column!r}")
        elif sorted(map(_rule_key, before)) != sorted(map(_rule_key, after)):
            changes.append(f"changed rule {kind} on {column!r}")
    if not changes:
        changes.append("rule order changed")
    return changes


def diff(old: Contract, new: Contract) -> ContractDiff:
    """Field-level and rule-level difference between two contract versions.

    Everything that alters the canonical form apart from version, provenance
    and status shows up in exactly one bucket, so an empty diff certifies
    textual equivalence modulo those keys.  Deterministic ordering by field
    name throughout.
    """
    result = ContractDiff()
    if old.name != new.name:
        result.constraint_changes.append(
            {"name": old.name, "description": f"contract renamed to {new.name!r}"})
    old_fields = {f.name.strip(): f for f in old.fields}
    new_fields = {f.name.strip(): f for f in new.fields}
    result.added_fields = sorted(n for n in new_fields if n not in old_fields)
    result.removed_fields = sorted(n for n in old_fields if n not in new_fields)
    common = [n for n in old_fields if n in new_fields]
    old_order = [f.name.strip() for f in old.fields if f.name.strip() in new_fields]
    new_order = [f.name.strip() for f in new.fields if f.name.strip() in old_fields]
    if old_order != new_order:
        result.constraint_changes.append(
            {"name": old.name, "description": "field order changed"})
    for name in sorted(common):
        old_spec, new_spec = old_fields[name], new_fields[name]
        if old_spec.logical_type != new_spec.logical_type:
            result.retyped.append({"name": name, "old_type": old_spec.logical_type,
                                   "new_type": new_spec.logical_type})
        if old_spec.nullable != new_spec.nullable:
            result.constraint_changes.append(
                {"name": name,
                 "description": f"nullable changed {old_spec.nullable} -> {new_spec.nullable}"})
        before, after = _constraints_doc(old_spec), _constraints_doc(new_spec)
        if before != after:
            result.constraint_changes.append(
                {"name": name, "description": f"constraints changed {before} -> {after}"})
        if old_spec.description != new_spec.description:
            result.constraint_changes.append(
                {"name": name, "description": "description changed"})
    result.rule_changes = _diff_rules(old, new)
    return result
