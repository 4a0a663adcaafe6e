"""Check contract syntax, validate rows against a contract, detect drift.

Row semantics: a value of ``None`` is null; any other value is reduced to a
text lexeme and checked through the lexical lattice (a lexeme conforms to a
field type when its class sits at or below that type, so integers conform to
number and everything conforms to string).  Empty-string lexemes classify as
the lattice bottom and therefore pass type, enum and range checks; only an
explicit null triggers nullability handling.

Contracts are exhaustive agreements: row keys that name no contract field
are violations unless ``allow_unknown`` is set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import lexical
from .errors import ContractForgeError
from .inference import infer_column_type
from .model import Contract, parse_contract
from .profiling import DataProfile, lexeme_of

TYPE_MISMATCH = "type_mismatch"
NULL_VIOLATION = "null_violation"
ENUM_VIOLATION = "enum_violation"
RANGE_VIOLATION = "range_violation"
UNKNOWN_FIELD = "unknown_field"
MISSING_FIELD = "missing_field"


@dataclass
class Violation:
    row_index: int
    field_name: str
    kind: str
    observed: str

    def to_doc(self) -> dict:
        return {"row_index": self.row_index, "field_name": self.field_name,
                "kind": self.kind, "observed": self.observed}


@dataclass
class ValidationReport:
    rows_checked: int
    rows_passed: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return self.rows_passed == self.rows_checked

    def to_doc(self) -> dict:
        return {"rows_checked": self.rows_checked, "rows_passed": self.rows_passed,
                "violations": [v.to_doc() for v in self.violations]}


def check_syntax(text: str) -> list[str]:
    """Diagnostics for contract text; empty list when it parses cleanly."""
    try:
        parse_contract(text)
    except ContractForgeError as exc:
        return [str(exc)]
    return []


def lattice_type(logical_type: str) -> str:
    """Map a field type onto the lexical lattice (enums are strings there)."""
    return lexical.STRING if logical_type == "enum_string" else logical_type


def _numeric_value(lexeme: str, cls: str) -> int | float:
    return int(lexeme) if cls == lexical.INTEGER else float(lexeme)


def _check_field(spec, value, row_index: int, out: list[Violation]) -> None:
    if value is None:
        if not spec.nullable:
            out.append(Violation(row_index, spec.name, NULL_VIOLATION, "null"))
        return
    lexeme = lexeme_of(value)
    cls = lexical.classify_lexeme(lexeme)
    if not lexical.is_subclass(cls, lattice_type(spec.logical_type)):
        out.append(Violation(row_index, spec.name, TYPE_MISMATCH, lexeme))
        return
    if cls == lexical.EMPTY:
        return
    c = spec.constraints
    if spec.logical_type == "enum_string" and c is not None and c.allowed_values is not None:
        if lexeme not in c.allowed_values:
            out.append(Violation(row_index, spec.name, ENUM_VIOLATION, lexeme))
    elif c is not None and cls in (lexical.INTEGER, lexical.NUMBER):
        number = _numeric_value(lexeme, cls)
        if (c.min_value is not None and number < c.min_value) or \
                (c.max_value is not None and number > c.max_value):
            out.append(Violation(row_index, spec.name, RANGE_VIOLATION, lexeme))


def value_conforms(spec, value) -> bool:
    """Would this single value pass row validation for the given field?"""
    if value is None:
        return spec.nullable
    out: list[Violation] = []
    _check_field(spec, value, 0, out)
    return not out


def validate_rows(contract: Contract, rows: list[dict],
                  allow_unknown: bool = False) -> ValidationReport:
    """Validate rows field by field; a row passes iff it has no violations.

    Deterministic output: violations are ordered by row index, then contract
    field order, then row key order for unknown fields.
    """
    known = {f.name for f in contract.fields}
    violations: list[Violation] = []
    rows_passed = 0
    for index, row in enumerate(rows):
        before = len(violations)
        for spec in contract.fields:
            if spec.name not in row:
                if not spec.nullable:
                    violations.append(Violation(index, spec.name, MISSING_FIELD, ""))
                continue
            _check_field(spec, row[spec.name], index, violations)
        if not allow_unknown:
            for key, value in row.items():
                if key not in known:
                    observed = "null" if value is None else lexeme_of(value)
                    violations.append(Violation(index, key, UNKNOWN_FIELD, observed))
        if len(violations) == before:
            rows_passed += 1
    return ValidationReport(rows_checked=len(rows), rows_passed=rows_passed,
                            violations=violations)


@dataclass
class Retyped:
    name: str
    old_type: str
    observed_type: str

    def to_doc(self) -> dict:
        return {"name": self.name, "old_type": self.old_type,
                "observed_type": self.observed_type}


@dataclass
class DriftReport:
    added_columns: list[str]
    removed_columns: list[str]
    retyped: list[Retyped]

    @property
    def breaking(self) -> bool:
        return bool(self.removed_columns or self.retyped)

    @property
    def empty(self) -> bool:
        return not (self.added_columns or self.removed_columns or self.retyped)

    def to_doc(self) -> dict:
        return {"added_columns": list(self.added_columns),
                "removed_columns": list(self.removed_columns),
                "retyped": [r.to_doc() for r in self.retyped],
                "breaking": self.breaking}


def detect_drift(contract: Contract, profile: DataProfile) -> DriftReport:
    """Structural difference between a contract and newly observed data.

    Extra columns are additive (non-breaking); removed columns and columns
    whose observed type no longer conforms to the declared type are breaking.
    """
    contract_names = [f.name.strip() for f in contract.fields]
    profile_names = [c.name.strip() for c in profile.columns]
    contract_set, profile_set = set(contract_names), set(profile_names)
    added = [n for n in profile_names if n not in contract_set]
    removed = [n for n in contract_names if n not in profile_set]
    retyped: list[Retyped] = []
    for spec in contract.fields:
        name = spec.name.strip()
        if name not in profile_set:
            continue
        column = next(c for c in profile.columns if c.name.strip() == name)
        observed = infer_column_type(column)
        if not lexical.is_subclass(observed, lattice_type(spec.logical_type)):
            retyped.append(Retyped(name=name, old_type=spec.logical_type,
                                   observed_type=observed))
    return DriftReport(added_columns=added, removed_columns=removed, retyped=retyped)
