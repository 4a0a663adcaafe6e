"""
Profiling a dataset
===================

Everything in contractforge starts from a DataProfile: column names, null
and distinct counts, a capped set of sampled values, and a lexical
histogram saying how each column's raw text classifies (integer, number,
date, ...).  Profiles are deterministic: the same bytes always produce the
same profile.
"""

from contractforge import IngestOptions, dump_profile, ingest

# A small delimited sample.  Empty cells are nulls; the literal "NA" is
# data unless you opt in to treating it as null.
CSV = b"""\
order_id,total,status,placed_at
1,9.50,active,2026-01-04T09:30:00Z
2,19.00,inactive,2026-01-05T10:00:00Z
3,23.75,active,2026-01-06T18:45:00Z
4,,active,2026-01-07T08:10:00Z
"""

profile = ingest(CSV, "delimited", dataset_name="orders")

print("columns:", profile.column_names())
for column in profile.columns:
    print(f"  {column.name}: {column.total_count} values, "
          f"{column.null_count} null, {column.distinct_count} distinct, "
          f"classes {column.lexical_histogram}")

# The profile file format is a single canonical JSON document; this exact
# text is what `contractforge profile` writes.
print()
print(dump_profile(profile))

# ndjson works too; nested objects are flattened one level deep by default,
# deeper structure is kept as a single serialized lexeme.
NDJSON = b"""\
{"user": {"id": 1, "name": "ada"}, "tags": ["a", "b"]}
{"user": {"id": 2, "name": "alan"}}
"""
nested = ingest(NDJSON, "ndjson", IngestOptions(flatten_depth=1),
                dataset_name="events")
print("ndjson columns:", nested.column_names())
print("tags column keeps structure as text:",
      nested.column("tags").sample_values)
print("missing keys count as nulls:", nested.column("tags").null_count)
