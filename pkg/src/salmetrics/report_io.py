"""Report documents and their JSON/CSV serialization.

A report bundles run metadata (everything needed to reproduce the numbers:
tool version, seed, policies, kernel size, thresholds), per-item records,
and a summary block. The summary is always derivable from the records;
loading a JSON report recomputes it and refuses documents where the two
disagree.

Serialization is canonical so reports are byte-for-byte deterministic:
JSON with sorted keys, shortest round-trip float formatting, two-space
indent, trailing newline; CSV per RFC 4180 (CRLF rows, mandatory header),
one flat row per record.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json

from .accuracy import AccuracyRecord, aggregate
from .errors import EmptyAggregate, FormatError, SchemaError
from .stability import StabilityRecord, aggregate_stability

FORMAT_NAME = "salmetrics-report"
FORMAT_VERSION = 1

_RECORD_TYPES = {"accuracy": AccuracyRecord, "stability": StabilityRecord}


def _accuracy_summary(records, small_threshold: float) -> dict:
    try:
        return dataclasses.asdict(aggregate(records, small_threshold=small_threshold))
    except EmptyAggregate:
        return {
            "records": len(records),
            "evaluated": 0,
            "degenerate": len(records),
            "mean_weighting_accuracy": None,
            "mean_pointing_hit_rate": None,
            "mean_uniform_baseline": None,
            "small_threshold": small_threshold,
            "small_count": 0,
            "mean_weighting_accuracy_small": None,
        }


def _stability_summary(records) -> dict:
    try:
        return dataclasses.asdict(aggregate_stability(records))
    except EmptyAggregate:
        return {
            "records": len(records),
            "evaluated": 0,
            "degenerate": len(records),
            "mean_correlation": None,
            "per_subject": (),
        }


@dataclasses.dataclass(frozen=True)
class ReportDocument:
    """kind is "accuracy" or "stability"; records hold the matching type."""

    kind: str
    metadata: dict
    records: tuple

    def __post_init__(self):
        if self.kind not in _RECORD_TYPES:
            raise SchemaError(f"unknown report kind {self.kind!r}")
        object.__setattr__(self, "records", tuple(self.records))
        want = _RECORD_TYPES[self.kind]
        for r in self.records:
            if not isinstance(r, want):
                raise SchemaError(f"{self.kind} report holds {type(r).__name__}")

    def summary_dict(self) -> dict:
        if self.kind == "accuracy":
            thr = float(self.metadata.get("small_threshold", 0.10))
            return _accuracy_summary(self.records, thr)
        return _stability_summary(self.records)

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "kind": self.kind,
            "metadata": self.metadata,
            "records": [dataclasses.asdict(r) for r in self.records],
            "summary": self.summary_dict(),
        }


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(doc: ReportDocument) -> str:
    fields = [f.name for f in dataclasses.fields(_RECORD_TYPES[doc.kind])]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(fields)
    for r in doc.records:
        d = dataclasses.asdict(r)
        writer.writerow([_csv_cell(d[name]) for name in fields])
    return buf.getvalue()


def write_report(doc: ReportDocument, path, format: str = "json") -> None:
    """Serialize a report. Identical documents produce identical bytes."""
    if format == "json":
        text = _canonical_json(doc.to_dict())
    elif format == "csv":
        text = _csv_text(doc)
    else:
        raise SchemaError(f"unknown report format {format!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _rebuild_record(kind: str, raw: dict):
    want = _RECORD_TYPES[kind]
    names = {f.name for f in dataclasses.fields(want)}
    extra = set(raw) - names
    if extra:
        raise SchemaError(f"record has unknown fields {sorted(extra)}")
    try:
        return want(**raw)
    except TypeError as exc:
        raise SchemaError(f"record missing fields: {exc}") from exc


def read_report(path) -> ReportDocument:
    """Load a JSON report, verifying the stored summary against the records."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot parse report {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise SchemaError(f"{path}: not a {FORMAT_NAME} document")
    if doc.get("version") != FORMAT_VERSION:
        raise SchemaError(f"{path}: unsupported report version {doc.get('version')!r}")
    for key in ("kind", "metadata", "records", "summary"):
        if key not in doc:
            raise SchemaError(f"{path}: missing {key!r}")
    kind = doc["kind"]
    if kind not in _RECORD_TYPES:
        raise SchemaError(f"{path}: unknown report kind {kind!r}")
    records = tuple(_rebuild_record(kind, raw) for raw in doc["records"])
    rebuilt = ReportDocument(kind=kind, metadata=doc["metadata"], records=records)
    # normalize tuples vs lists through a JSON bounce before comparing
    recomputed = json.loads(json.dumps(rebuilt.summary_dict()))
    if recomputed != doc["summary"]:
        raise SchemaError(f"{path}: summary block does not match its records")
    return rebuilt
