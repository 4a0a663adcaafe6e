"""Shared fixtures: small deterministic profiles built through real ingest."""

from __future__ import annotations

import pytest

from contractforge.profiling import IngestOptions, ingest


def csv_bytes(header: list[str], rows: list[list[str]]) -> bytes:
    lines = [",".join(header)] + [",".join(row) for row in rows]
    return ("\n".join(lines) + "\n").encode("utf-8")


def profile_of(header, rows, name="fixture", **options) -> "DataProfile":
    return ingest(csv_bytes(header, rows), "delimited",
                  IngestOptions(**options) if options else None,
                  dataset_name=name)


@pytest.fixture
def toy_profile():
    """Two columns: integer id, nullable number price."""
    return profile_of(["id", "price"], [["1", "2.5"], ["2", ""]], name="toy")


@pytest.fixture
def status_profile():
    """30 rows: unique id, alternating active/inactive status (enum-eligible),
    ISO dates.  Drives enum promotion and quality-rule synthesis."""
    rows = [[str(i + 1), "active" if i % 2 == 0 else "inactive",
             f"2026-01-{(i % 28) + 1:02d}"] for i in range(30)]
    return profile_of(["id", "status", "created"], rows, name="accounts")
