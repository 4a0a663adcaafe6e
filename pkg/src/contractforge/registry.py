"""Versioned contract store: publish, review, feedback, persistence.

Layout: one directory per contract name under the store root, holding one
immutable ``v<N>.json`` per version (canonical contract text) plus a
``meta.json`` with statuses, the compatibility mode and feedback.  Writes go
to a temp file, are fsynced, then atomically renamed, so a crash never
leaves a half-written file.  Version files are the authority for which
versions exist; an orphan version file (crash between the two writes) is
re-adopted as a draft on the next startup scan.

Writes are serialized per contract name, so concurrent publishes to one
name get distinct consecutive versions; independent names proceed in
parallel.  Reads hit immutable files and need no lock.
"""

from __future__ import annotations

import copy
import json
import os
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .compatibility import COMPATIBILITY_MODES, CompatibilityVerdict, check_compatibility
from .errors import NotFoundError, RegistryError, RegistryRejection
from .model import Contract, canonicalize, parse_contract

_NAME_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9_.-]*\Z")
DEFAULT_COMPATIBILITY_MODE = "backward"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(text)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, path)


@dataclass
class FeedbackNote:
    at: str
    author: str
    note: str

    def to_doc(self) -> dict:
        return {"at": self.at, "author": self.author, "note": self.note}

    @classmethod
    def from_doc(cls, doc: dict) -> "FeedbackNote":
        return cls(at=doc["at"], author=doc["author"], note=doc["note"])


@dataclass
class VersionRecord:
    version: int
    status: str
    published_at: str
    reviewer: str | None = None
    feedback: list[FeedbackNote] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {"version": self.version, "status": self.status,
                "published_at": self.published_at, "reviewer": self.reviewer,
                "feedback": [f.to_doc() for f in self.feedback]}

    @classmethod
    def from_doc(cls, doc: dict) -> "VersionRecord":
        return cls(version=doc["version"], status=doc["status"],
                   published_at=doc["published_at"], reviewer=doc.get("reviewer"),
                   feedback=[FeedbackNote.from_doc(f) for f in doc.get("feedback", [])])


class _Entry:
    def __init__(self, name: str, mode: str = DEFAULT_COMPATIBILITY_MODE):
        self.name = name
        self.compatibility_mode = mode
        self.versions: dict[int, VersionRecord] = {}
        self.lock = threading.Lock()


class RegistryStore:
    """File-backed registry; safe for concurrent use within one process."""

    def __init__(self, root):
        self._root = Path(root)
        self._root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._entries: dict[str, _Entry] = {}
        self._scan()

    # -- startup -----------------------------------------------------------

    def _scan(self) -> None:
        for child in sorted(self._root.iterdir()):
            if not child.is_dir():
                continue
            entry = _Entry(child.name)
            meta_path = child / "meta.json"
            meta: dict = {}
            if meta_path.exists():
                meta = json.loads(meta_path.read_text(encoding="utf-8"))
            entry.compatibility_mode = meta.get("compatibility_mode",
                                                DEFAULT_COMPATIBILITY_MODE)
            by_version = {doc["version"]: VersionRecord.from_doc(doc)
                          for doc in meta.get("versions", [])}
            for version_file in child.glob("v*.json"):
                try:
                    number = int(version_file.stem[1:])
                except ValueError:
                    continue
                record = by_version.get(number)
                if record is None:
                    # orphan from a crash between contract and meta writes
                    record = VersionRecord(version=number, status="draft",
                                           published_at=_utc_now())
                entry.versions[number] = record
            self._entries[entry.name] = entry

    # -- helpers -----------------------------------------------------------

    def _entry_dir(self, name: str) -> Path:
        return self._root / name

    def _require_entry(self, name: str) -> _Entry:
        entry = self._entries.get(name)
        if entry is None:
            raise NotFoundError(f"unknown contract {name!r}")
        return entry

    def _ensure_entry(self, name: str) -> _Entry:
        if not _NAME_RE.match(name):
            raise RegistryError(f"invalid contract name {name!r}")
        with self._lock:
            entry = self._entries.get(name)
            if entry is None:
                entry = _Entry(name)
                self._entry_dir(name).mkdir(parents=True, exist_ok=True)
                self._entries[name] = entry
                self._write_meta(entry)
            return entry

    def _write_meta(self, entry: _Entry) -> None:
        doc = {
            "compatibility_mode": entry.compatibility_mode,
            "versions": [entry.versions[v].to_doc() for v in sorted(entry.versions)],
        }
        text = json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=True) + "\n"
        _atomic_write(self._entry_dir(entry.name) / "meta.json", text)

    def _load_contract(self, name: str, version: int,
                       record: VersionRecord) -> Contract:
        path = self._entry_dir(name) / f"v{version}.json"
        try:
            contract = parse_contract(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise RegistryError(f"missing version file for {name} v{version}: {exc}") from exc
        contract.status = record.status
        return contract

    # -- public API --------------------------------------------------------

    def names(self) -> list[str]:
        with self._lock:
            return sorted(self._entries)

    def compatibility_mode(self, name: str) -> str:
        return self._require_entry(name).compatibility_mode

    def set_compatibility_mode(self, name: str, mode: str) -> None:
        if mode not in COMPATIBILITY_MODES:
            raise RegistryError(f"unknown compatibility mode {mode!r}")
        entry = self._ensure_entry(name)
        with entry.lock:
            entry.compatibility_mode = mode
            self._write_meta(entry)

    def publish(self, name: str, contract: Contract) -> int:
        """Store a new draft version, enforcing the entry's compatibility
        mode against the latest approved version.  The write is atomic and
        durable before the assigned version number is returned."""
        contract.validate()
        entry = self._ensure_entry(name)
        with entry.lock:
            approved = self._latest_approved_locked(entry)
            if approved is not None:
                approved_version, approved_contract = approved
                verdict = check_compatibility(approved_contract, contract,
                                              entry.compatibility_mode)
                if not verdict.compatible:
                    raise RegistryRejection(verdict.reasons)
            version = max(entry.versions, default=0) + 1
            stored = copy.deepcopy(contract)
            stored.name = name
            stored.version = version
            stored.status = "draft"
            stored.validate()
            _atomic_write(self._entry_dir(name) / f"v{version}.json",
                          canonicalize(stored))
            entry.versions[version] = VersionRecord(version=version, status="draft",
                                                    published_at=_utc_now())
            self._write_meta(entry)
            return version

    def _latest_approved_locked(self, entry: _Entry) -> tuple[int, Contract] | None:
        approved = [v for v, r in entry.versions.items() if r.status == "approved"]
        if not approved:
            return None
        version = max(approved)
        return version, self._load_contract(entry.name, version, entry.versions[version])

    def latest_approved(self, name: str) -> tuple[int, Contract] | None:
        entry = self._require_entry(name)
        with entry.lock:
            return self._latest_approved_locked(entry)

    def get_version(self, name: str, version: int) -> Contract:
        entry = self._require_entry(name)
        record = entry.versions.get(version)
        if record is None:
            raise NotFoundError(f"contract {name!r} has no version {version}")
        return self._load_contract(name, version, record)

    def get_record(self, name: str, version: int) -> VersionRecord:
        entry = self._require_entry(name)
        record = entry.versions.get(version)
        if record is None:
            raise NotFoundError(f"contract {name!r} has no version {version}")
        return copy.deepcopy(record)

    def list_versions(self, name: str) -> list[VersionRecord]:
        entry = self._require_entry(name)
        with entry.lock:
            return [copy.deepcopy(entry.versions[v]) for v in sorted(entry.versions)]

    def approve(self, name: str, version: int, reviewer: str) -> VersionRecord:
        """Promote a draft; whichever version was approved before becomes
        deprecated, so at most one approved version exists per name."""
        entry = self._require_entry(name)
        with entry.lock:
            record = entry.versions.get(version)
            if record is None:
                raise NotFoundError(f"contract {name!r} has no version {version}")
            if record.status == "approved":
                raise RegistryError(f"{name} v{version} is already approved")
            if record.status == "deprecated":
                raise RegistryError(f"cannot approve deprecated version {name} v{version}")
            for other in entry.versions.values():
                if other.status == "approved":
                    other.status = "deprecated"
            record.status = "approved"
            record.reviewer = reviewer
            self._write_meta(entry)
            return copy.deepcopy(record)

    def record_feedback(self, name: str, version: int, author: str, note: str) -> None:
        entry = self._require_entry(name)
        with entry.lock:
            record = entry.versions.get(version)
            if record is None:
                raise NotFoundError(f"contract {name!r} has no version {version}")
            record.feedback.append(FeedbackNote(at=_utc_now(), author=author, note=note))
            self._write_meta(entry)

    def check_candidate(self, name: str, contract: Contract) -> CompatibilityVerdict:
        """Compatibility verdict against the latest approved version without
        publishing; trivially compatible when nothing is approved yet."""
        contract.validate()
        entry = self._entries.get(name)
        if entry is None:
            return CompatibilityVerdict(True, [])
        with entry.lock:
            approved = self._latest_approved_locked(entry)
            if approved is None:
                return CompatibilityVerdict(True, [])
            _, approved_contract = approved
            return check_compatibility(approved_contract, contract,
                                       entry.compatibility_mode)
