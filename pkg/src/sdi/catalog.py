"""Persistent metadata catalog with spatial and inverted text indexes.

On-disk layout (one directory per catalog):
    records.log    append-only mutation log; each line is either a canonical
                   record document (upsert) or {"_deleted": "<id>"} (delete)
    snapshot.json  periodic compaction of the log
    MANIFEST       {"format_version": "1", "record_count": N, "catalog_version": V}

Indexes are rebuilt on open (bulk load). All public methods hold one lock, so
readers never observe a half-applied mutation; the writer contract (many
readers or one writer) is satisfied by construction.
"""

from __future__ import annotations

import enum
import json
import os
import threading
import warnings
from collections import Counter
from pathlib import Path
from typing import NamedTuple

from .metadata import (
    GeographicBoundingBox,
    MetadataRecord,
    TEXT_FIELDS,
    field_text,
    payload_to_record,
    record_to_payload,
    record_violations,
    to_canonical,
    with_refreshed_modified,
)
from .rtree import BoxTree
from .text import tokenize

FORMAT_VERSION = "1"
LOG_NAME = "records.log"
SNAPSHOT_NAME = "snapshot.json"
MANIFEST_NAME = "MANIFEST"

# Log lines accumulated before the log is folded into snapshot.json.
COMPACT_THRESHOLD = 1024


class SpatialRelation(enum.Enum):
    INTERSECTS = "intersects"
    WITHIN = "within"


class CatalogError(Exception):
    pass


class InvariantViolation(CatalogError):
    """Record rejected at upsert; the store is unchanged."""

    def __init__(self, problems: list[tuple[str, str]]):
        super().__init__("; ".join(f"{field}: {message}" for field, message in problems))
        self.problems = problems


class InvalidBoxError(CatalogError):
    pass


class CorruptLogError(CatalogError):
    pass


class Posting(NamedTuple):
    record_id: str
    field: str
    tf: int


class Catalog:
    """Record store bound to a directory. Use as a context manager or call close()."""

    def __init__(self, directory: str | Path):
        self._dir = Path(directory)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._records: dict[str, MetadataRecord] = {}
        self._tree = BoxTree(max_entries=16)
        self._text: dict[str, dict[str, dict[str, int]]] = {}
        self._version = 0
        self._log_lines = 0
        self._closed = False
        self._load()
        self._log = open(self._dir / LOG_NAME, "a", encoding="utf-8")

    @property
    def directory(self) -> Path:
        return self._dir

    @property
    def version(self) -> int:
        with self._lock:
            return self._version

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def __enter__(self) -> "Catalog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- mutations ---------------------------------------------------------

    def upsert(self, record: MetadataRecord) -> str:
        with self._lock:
            self._ensure_open()
            problems = record_violations(record)
            if problems:
                raise InvariantViolation(problems)
            existing = self._records.get(record.id)
            # First insert keeps the record's own created; replacement keeps
            # the stored one so re-publishing the same resource is idempotent.
            stored = with_refreshed_modified(
                record, created=existing.created if existing else None
            )
            if existing is not None:
                self._deindex(existing)
            self._records[stored.id] = stored
            self._index(stored)
            # Version is bumped before the log append so a compaction triggered
            # by this very line snapshots the post-mutation version.
            self._version += 1
            self._append_log(to_canonical(stored))
            return stored.id

    def delete(self, record_id: str) -> bool:
        with self._lock:
            self._ensure_open()
            record = self._records.pop(record_id, None)
            if record is None:
                return False
            self._deindex(record)
            self._version += 1
            self._append_log(json.dumps({"_deleted": record_id}, ensure_ascii=False))
            return True

    # -- queries -----------------------------------------------------------

    def get(self, record_id: str) -> MetadataRecord | None:
        with self._lock:
            return self._records.get(record_id)

    def ids(self) -> set[str]:
        with self._lock:
            return set(self._records)

    def records(self) -> list[MetadataRecord]:
        with self._lock:
            return list(self._records.values())

    def spatial_query(self, box: GeographicBoundingBox, relation: SpatialRelation) -> set[str]:
        problems = box.violations()
        if problems:
            raise InvalidBoxError("; ".join(problems))
        query = (box.west, box.south, box.east, box.north)
        with self._lock:
            if relation is SpatialRelation.WITHIN:
                return self._tree.search_within(query)
            if relation is SpatialRelation.INTERSECTS:
                return self._tree.search_intersects(query)
            raise InvalidBoxError(f"unknown relation: {relation!r}")

    def text_postings(self, term: str) -> list[Posting]:
        with self._lock:
            per_record = self._text.get(term)
            if not per_record:
                return []
            out = [
                Posting(record_id, field, tf)
                for record_id, fields in per_record.items()
                for field, tf in fields.items()
            ]
        out.sort()
        return out

    def document_frequency(self, term: str) -> int:
        with self._lock:
            return len(self._text.get(term, ()))

    # -- maintenance ---------------------------------------------------------

    def audit(self) -> list[str]:
        """Cross-check both indexes against the record map; empty list means consistent."""
        problems = []
        with self._lock:
            tree_items = dict(self._tree.items())
            for record_id, box in tree_items.items():
                record = self._records.get(record_id)
                if record is None:
                    problems.append(f"spatial index holds unknown id {record_id!r}")
                elif record.bbox is None:
                    problems.append(f"spatial index holds id {record_id!r} without bbox")
                elif box != (record.bbox.west, record.bbox.south, record.bbox.east, record.bbox.north):
                    problems.append(f"spatial index box mismatch for {record_id!r}")
            for record_id, record in self._records.items():
                if record.bbox is not None and record.bbox.is_valid() and record_id not in tree_items:
                    problems.append(f"record {record_id!r} missing from spatial index")

            expected: dict[str, dict[str, dict[str, int]]] = {}
            for record in self._records.values():
                for field, counts in _field_term_counts(record).items():
                    for term, tf in counts.items():
                        expected.setdefault(term, {}).setdefault(record.id, {})[field] = tf
            if expected != self._text:
                problems.append("text index differs from a recount of all records")
        return problems

    def compact(self) -> None:
        with self._lock:
            self._ensure_open()
            self._write_snapshot()
            self._log.close()
            self._log = open(self._dir / LOG_NAME, "w", encoding="utf-8")
            self._log_lines = 0
            self._write_manifest()

    def close(self) -> None:
        with self._lock:
            if self._closed:
                return
            self._log.flush()
            self._log.close()
            self._write_manifest()
            self._closed = True

    # -- internals -----------------------------------------------------------

    def _ensure_open(self) -> None:
        if self._closed:
            raise CatalogError("catalog is closed")

    def _append_log(self, line: str) -> None:
        self._log.write(line + "\n")
        self._log.flush()
        self._log_lines += 1
        if self._log_lines >= COMPACT_THRESHOLD:
            self._write_snapshot()
            self._log.close()
            self._log = open(self._dir / LOG_NAME, "w", encoding="utf-8")
            self._log_lines = 0

    def _index(self, record: MetadataRecord) -> None:
        if record.bbox is not None:
            self._tree.insert(
                record.id, (record.bbox.west, record.bbox.south, record.bbox.east, record.bbox.north)
            )
        for field, counts in _field_term_counts(record).items():
            for term, tf in counts.items():
                self._text.setdefault(term, {}).setdefault(record.id, {})[field] = tf

    def _deindex(self, record: MetadataRecord) -> None:
        self._tree.remove(record.id)
        for field, counts in _field_term_counts(record).items():
            for term in counts:
                per_record = self._text.get(term)
                if per_record is None:
                    continue
                fields = per_record.get(record.id)
                if fields is not None:
                    fields.pop(field, None)
                    if not fields:
                        per_record.pop(record.id)
                if not per_record:
                    self._text.pop(term)

    def _load(self) -> None:
        snapshot_path = self._dir / SNAPSHOT_NAME
        if snapshot_path.exists():
            snapshot = json.loads(snapshot_path.read_text("utf-8"))
            if snapshot.get("format_version") != FORMAT_VERSION:
                raise CatalogError(f"unsupported snapshot format: {snapshot.get('format_version')!r}")
            self._version = int(snapshot.get("catalog_version", 0))
            for obj in snapshot.get("records", []):
                record = payload_to_record(obj)
                self._records[record.id] = record

        log_path = self._dir / LOG_NAME
        if log_path.exists():
            lines = log_path.read_text("utf-8").splitlines()
            for number, line in enumerate(lines, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    if number == len(lines):
                        # Torn final write (e.g. crash mid-append): drop it.
                        warnings.warn(f"ignoring partial trailing log line {number}")
                        continue
                    raise CorruptLogError(f"{log_path}:{number}: {exc.msg}") from exc
                if isinstance(obj, dict) and "_deleted" in obj:
                    self._records.pop(obj["_deleted"], None)
                else:
                    record = payload_to_record(obj)
                    self._records[record.id] = record
                self._version += 1
            self._log_lines = len(lines)

        self._reindex()

    def _reindex(self) -> None:
        self._tree = BoxTree(max_entries=16)
        self._tree.bulk_load(
            (record.id, (record.bbox.west, record.bbox.south, record.bbox.east, record.bbox.north))
            for record in self._records.values()
            if record.bbox is not None
        )
        self._text = {}
        for record in self._records.values():
            for field, counts in _field_term_counts(record).items():
                for term, tf in counts.items():
                    self._text.setdefault(term, {}).setdefault(record.id, {})[field] = tf

    def _write_snapshot(self) -> None:
        payload = {
            "format_version": FORMAT_VERSION,
            "catalog_version": self._version,
            "records": [
                record_to_payload(self._records[record_id]) for record_id in sorted(self._records)
            ],
        }
        tmp = self._dir / (SNAPSHOT_NAME + ".tmp")
        tmp.write_text(json.dumps(payload, ensure_ascii=False), "utf-8")
        os.replace(tmp, self._dir / SNAPSHOT_NAME)

    def _write_manifest(self) -> None:
        payload = {
            "format_version": FORMAT_VERSION,
            "record_count": len(self._records),
            "catalog_version": self._version,
        }
        tmp = self._dir / (MANIFEST_NAME + ".tmp")
        tmp.write_text(json.dumps(payload) + "\n", "utf-8")
        os.replace(tmp, self._dir / MANIFEST_NAME)


def _field_term_counts(record: MetadataRecord) -> dict[str, Counter]:
    out = {}
    for field in TEXT_FIELDS:
        tokens = tokenize(field_text(record, field))
        if tokens:
            out[field] = Counter(tokens)
    return out
