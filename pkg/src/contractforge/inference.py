"""Deterministic schema inference from a data profile.

This is the engine's ground-truth path: it serves as an independent oracle
for evaluating generated contracts, as a generation backend in its own
right, and as the producer of the safe fallback contract used when no
generated candidate survives validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import lexical
from .errors import ContractForgeError
from .model import Constraints, Contract, FieldSpec, Provenance
from .profiling import ColumnProfile, DataProfile

ORACLE_BACKEND_ID = "oracle"


@dataclass
class InferenceOptions:
    # Enum promotion: at least this many rows and at most
    # min(enum_max_values, ceil(enum_fraction * rows)) distinct values.
    # Tuned to fire on desk-scale fixtures without promoting ID-like columns.
    enum_min_rows: int = 20
    enum_max_values: int = 10
    enum_fraction: float = 0.1
    generated_at: str | None = None


def _observed_classes(column: ColumnProfile) -> list[str]:
    return [c for c, n in column.lexical_histogram.items()
            if n > 0 and c != lexical.EMPTY]


def infer_column_type(column: ColumnProfile) -> str:
    """Least general lexical class covering every non-null value; a column
    with no non-null values defaults to string."""
    joined = lexical.join_all(_observed_classes(column))
    return lexical.STRING if joined == lexical.EMPTY else joined


def _numeric_bounds(column: ColumnProfile, logical_type: str) -> Constraints | None:
    values: list[float | int] = []
    for lexeme in column.sample_values:
        cls = lexical.classify_lexeme(lexeme)
        if cls == lexical.INTEGER:
            values.append(int(lexeme))
        elif cls == lexical.NUMBER:
            values.append(float(lexeme))
    if not values:
        return None
    lo, hi = min(values), max(values)
    if logical_type == "number":
        lo, hi = float(lo), float(hi)
    return Constraints(min_value=lo, max_value=hi)


def _enum_eligible(column: ColumnProfile, options: InferenceOptions) -> bool:
    if column.total_count < options.enum_min_rows or column.distinct_count == 0:
        return False
    cap = min(options.enum_max_values,
              math.ceil(round(column.total_count * options.enum_fraction, 9)))
    if column.distinct_count > cap:
        return False
    # Promote only when the sample provably holds every distinct value.
    return len(set(column.sample_values)) == column.distinct_count


def infer_field(column: ColumnProfile,
                options: InferenceOptions | None = None) -> FieldSpec:
    options = options or InferenceOptions()
    logical_type = infer_column_type(column)
    nullable = column.null_count > 0
    constraints = None
    if logical_type == lexical.STRING and _enum_eligible(column, options):
        logical_type = "enum_string"
        constraints = Constraints(allowed_values=sorted(set(column.sample_values)))
    elif logical_type in (lexical.INTEGER, lexical.NUMBER):
        constraints = _numeric_bounds(column, logical_type)
    return FieldSpec(name=column.name, logical_type=logical_type,
                     nullable=nullable, constraints=constraints)


def infer_contract(profile: DataProfile,
                   options: InferenceOptions | None = None) -> Contract:
    """Deterministic stand-in for the generation step: one field per profile
    column, types from the lexical lattice, enum promotion for small stable
    value domains, observed min/max on numeric columns (no padding)."""
    options = options or InferenceOptions()
    if not profile.columns:
        raise ContractForgeError("empty profile")
    contract = Contract(
        name=profile.dataset_name,
        fields=[infer_field(c, options) for c in profile.columns],
        version=1,
        status="draft",
        provenance=Provenance(backend_id=ORACLE_BACKEND_ID, generator_mode="oracle",
                              generated_at=options.generated_at),
    )
    contract.validate()
    return contract


def safe_generic_contract(profile: DataProfile,
                          generated_at: str | None = None) -> Contract:
    """The fallback contract: every column a nullable string field, no
    constraints, no rules.  Accepts anything the source data contained."""
    if not profile.columns:
        raise ContractForgeError("empty profile")
    return Contract(
        name=profile.dataset_name,
        fields=[FieldSpec(name=c.name, logical_type="string", nullable=True)
                for c in profile.columns],
        version=1,
        status="draft",
        provenance=Provenance(backend_id="fallback", generator_mode="fallback",
                              generated_at=generated_at),
    )
