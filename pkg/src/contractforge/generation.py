"""Completion post-processing: extract, repair, score, choose or fall back.

The repair chain is deliberately short: strip code fences, trim to the
outermost balanced brace span, drop trailing commas.  Anything it cannot
recover goes down the fallback path instead of being manufactured into a
contract the backend never wrote.  Every contract leaving this module parses
cleanly, by construction.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .backends import CompletionBackend, GenerationRequest
from .errors import ContractForgeError, ExtractionFailure
from .inference import safe_generic_contract
from .model import Contract, Provenance, contract_from_doc
from .profiling import DataProfile
from .prompts import SINGLE_PASS, TWO_PASS_STAGE1, TWO_PASS_STAGE2, build_prompt
from .validation import validate_rows

TWO_PASS = "two_pass"

STRIP_FENCES = "strip_fences"
TRIM_TO_BRACES = "trim_to_braces"
REMOVE_TRAILING_COMMAS = "remove_trailing_commas"

_FENCE_RE = re.compile(r"```[a-zA-Z]*\s*\n?(.*?)```", re.DOTALL)


@dataclass
class GenerationPolicy:
    mode: str = SINGLE_PASS
    candidate_count: int = 1
    temperature: float = 0.0
    threshold: float = 0.5
    max_output_chars: int = 8000
    # Provenance timestamp; left unset the library stays deterministic and
    # the CLI stamps wall-clock time itself.
    generated_at: str | None = None


@dataclass
class CandidateRecord:
    raw_text: str
    repairs_applied: list[str] = field(default_factory=list)
    parsed: Contract | None = None
    score: float | None = None
    error: str | None = None

    def to_doc(self) -> dict:
        return {
            "raw_text": self.raw_text,
            "repairs_applied": list(self.repairs_applied),
            "parsed": self.parsed.to_doc() if self.parsed is not None else None,
            "score": self.score,
            "error": self.error,
        }


@dataclass
class GenerationReport:
    candidates: list[CandidateRecord]
    chosen: int | None
    fallback: bool
    mode: str

    def validate(self) -> None:
        if self.fallback == (self.chosen is not None):
            raise ContractForgeError("report must carry exactly one of chosen index or fallback marker")
        if self.chosen is not None and self.candidates[self.chosen].parsed is None:
            raise ContractForgeError("chosen candidate did not parse")

    def to_doc(self) -> dict:
        return {"mode": self.mode, "fallback": self.fallback, "chosen": self.chosen,
                "candidates": [c.to_doc() for c in self.candidates]}


def strip_fences(text: str) -> str:
    """Return the body of the first fenced code block, if any."""
    match = _FENCE_RE.search(text)
    return match.group(1) if match else text


def _balanced_span(text: str, open_char: str, close_char: str) -> str | None:
    """First balanced span between the delimiters, string-literal aware.

    Single pass: the span of the earliest opener that gets matched, so
    openers that never close are skipped and nesting picks the outermost.
    """
    stack: list[int] = []
    best: tuple[int, int] | None = None
    in_string = False
    escaped = False
    for pos, ch in enumerate(text):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == open_char:
            stack.append(pos)
        elif ch == close_char and stack:
            start = stack.pop()
            if best is None or start < best[0]:
                best = (start, pos)
    if best is None:
        return None
    return text[best[0]:best[1] + 1]


def trim_to_braces(text: str) -> str:
    span = _balanced_span(text, "{", "}")
    return span if span is not None else text


def remove_trailing_commas(text: str) -> str:
    """Drop commas that directly precede a closer, outside string literals."""
    out: list[str] = []
    in_string = False
    escaped = False
    for ch in text:
        if in_string:
            out.append(ch)
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
            out.append(ch)
            continue
        if ch in "}]":
            # walk back over whitespace to find a trailing comma
            idx = len(out) - 1
            while idx >= 0 and out[idx] in " \t\r\n":
                idx -= 1
            if idx >= 0 and out[idx] == ",":
                del out[idx]
        out.append(ch)
    return "".join(out)


_SCHEMA_TYPE_MAP = {"integer": "integer", "number": "number",
                    "boolean": "boolean", "string": "string"}


def _wrap_bare_schema(doc: dict) -> dict:
    """Lift a JSON-Schema-like object (has ``properties``, no ``fields``)
    into the contract document shape with inferred defaults."""
    properties = doc.get("properties")
    if not isinstance(properties, dict):
        raise ExtractionFailure("schema-like object without a properties map")
    required = doc.get("required")
    required_names = set(required) if isinstance(required, list) else set()
    fields = []
    for name, prop in properties.items():
        if not isinstance(prop, dict):
            raise ExtractionFailure(f"property {name!r} is not an object")
        nullable = name not in required_names
        declared = prop.get("type")
        if isinstance(declared, list):
            if "null" in declared:
                nullable = True
            non_null = [t for t in declared if t != "null"]
            declared = non_null[0] if len(non_null) == 1 else "string"
        logical = _SCHEMA_TYPE_MAP.get(declared, "string")
        constraints = None
        if logical == "string":
            fmt = prop.get("format")
            if fmt == "date":
                logical = "date"
            elif fmt == "date-time":
                logical = "timestamp"
            enum = prop.get("enum")
            if isinstance(enum, list):
                values = list(dict.fromkeys(v for v in enum if isinstance(v, str)))
                if values:
                    logical = "enum_string"
                    constraints = {"allowed_values": values}
        field_doc: dict = {"name": str(name), "logical_type": logical,
                           "nullable": nullable}
        if constraints is not None:
            field_doc["constraints"] = constraints
        if isinstance(prop.get("description"), str):
            field_doc["description"] = prop["description"]
        fields.append(field_doc)
    title = doc.get("title")
    return {
        "name": title if isinstance(title, str) and title else "contract",
        "version": 1,
        "status": "draft",
        "fields": fields,
        "rules": [],
    }


def _try_parse(text: str) -> Contract:
    doc = json.loads(text)
    if isinstance(doc, dict) and "properties" in doc and "fields" not in doc:
        doc = _wrap_bare_schema(doc)
    return contract_from_doc(doc)


def extract_contract(completion: str) -> tuple[Contract, list[str]]:
    """Parse a completion, applying repair steps in order and only as needed.

    Returns the contract plus the names of the repairs that were applied.
    Raises :class:`ExtractionFailure` when no repair sequence yields a valid
    contract; in particular, input without a balanced brace pair never
    parses.
    """
    text = completion
    repairs: list[str] = []
    last_error: Exception | None = None
    try:
        return _try_parse(text), repairs
    except (ValueError, ContractForgeError) as exc:
        last_error = exc
    for name, step in ((STRIP_FENCES, strip_fences),
                       (TRIM_TO_BRACES, trim_to_braces),
                       (REMOVE_TRAILING_COMMAS, remove_trailing_commas)):
        repaired = step(text)
        if repaired.strip() == text.strip():  # no material change
            continue
        text = repaired
        repairs.append(name)
        try:
            return _try_parse(text), repairs
        except (ValueError, ContractForgeError) as exc:
            last_error = exc
    raise ExtractionFailure(f"no contract recovered: {last_error}")


def score_candidate(contract: Contract, profile: DataProfile) -> float:
    """Validator score in [0, 1]: column coverage (0.5), sample-row pass
    rate (0.3) and absence of invented fields (0.2)."""
    columns = {c.name.strip() for c in profile.columns}
    fields = {f.name.strip() for f in contract.fields}
    coverage = len(fields & columns) / max(1, len(columns))
    if profile.sample_rows:
        report = validate_rows(contract, profile.sample_rows)
        row_pass_rate = report.rows_passed / report.rows_checked
    else:
        row_pass_rate = 1.0
    hallucination_rate = len(fields - columns) / max(1, len(fields))
    return 0.5 * coverage + 0.3 * row_pass_rate + 0.2 * (1.0 - hallucination_rate)


def _parse_stage1(text: str) -> list[str] | None:
    candidate = strip_fences(text)
    span = _balanced_span(candidate, "[", "]")
    if span is not None:
        candidate = span
    try:
        doc = json.loads(candidate)
    except ValueError:
        return None
    if isinstance(doc, list) and doc and all(isinstance(v, str) for v in doc):
        return [v.strip() for v in doc]
    return None


def generate_contract(profile: DataProfile, backend: CompletionBackend,
                      policy: GenerationPolicy | None = None) -> tuple[Contract, GenerationReport]:
    """Run the full generation flow for one profile.

    Builds the prompt(s), requests candidates, repairs and scores them, and
    returns the best one; when nothing parses or the best score falls below
    the policy threshold, the safe generic contract is returned with the
    fallback marker set.  Backend transport failures propagate; fallback is
    a success path, transport failure is not.
    """
    policy = policy or GenerationPolicy()
    if not profile.columns:
        raise ContractForgeError("empty profile")

    effective_mode = SINGLE_PASS if policy.mode not in (TWO_PASS,) else TWO_PASS
    stage1_columns = None
    if policy.mode == TWO_PASS:
        stage1_request = GenerationRequest(
            prompt=build_prompt(profile, TWO_PASS_STAGE1),
            temperature=policy.temperature,
            max_output_chars=policy.max_output_chars,
            candidate_count=1,
        )
        stage1_texts = backend.complete(stage1_request)
        stage1_columns = _parse_stage1(stage1_texts[0]) if stage1_texts else None
        if stage1_columns is None:
            effective_mode = SINGLE_PASS  # degrade rather than fail

    prompt_mode = TWO_PASS_STAGE2 if stage1_columns is not None else SINGLE_PASS
    request = GenerationRequest(
        prompt=build_prompt(profile, prompt_mode, stage1_columns),
        temperature=policy.temperature,
        max_output_chars=policy.max_output_chars,
        candidate_count=policy.candidate_count,
    )
    texts = backend.complete(request)[: policy.candidate_count]

    candidates: list[CandidateRecord] = []
    for text in texts:
        record = CandidateRecord(raw_text=text)
        try:
            record.parsed, record.repairs_applied = extract_contract(text)
            record.score = score_candidate(record.parsed, profile)
        except ContractForgeError as exc:
            record.error = str(exc)
        candidates.append(record)

    best: int | None = None
    for index, record in enumerate(candidates):
        if record.parsed is None:
            continue
        if best is None or record.score > candidates[best].score:
            best = index

    if best is None or candidates[best].score < policy.threshold:
        contract = safe_generic_contract(profile, generated_at=policy.generated_at)
        contract.provenance.backend_id = backend.backend_id
        report = GenerationReport(candidates=candidates, chosen=None,
                                  fallback=True, mode=effective_mode)
        report.validate()
        return contract, report

    contract = candidates[best].parsed
    contract.provenance = Provenance(backend_id=backend.backend_id,
                                     generator_mode="backend",
                                     generated_at=policy.generated_at)
    report = GenerationReport(candidates=candidates, chosen=best,
                              fallback=False, mode=effective_mode)
    report.validate()
    return contract, report
