"""Canonical metadata records, profiles, validation, and the canonical JSON format."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, fields, replace
from datetime import datetime, timezone
from urllib.parse import urlsplit

RESOURCE_TYPES = frozenset({"dataset", "service", "map", "tool"})

# Serialization order of the canonical document; also the authoritative field list.
CANONICAL_FIELDS = (
    "id",
    "resource_type",
    "title",
    "abstract",
    "keywords",
    "topic_category",
    "bbox",
    "temporal_extent",
    "crs_list",
    "lineage",
    "publisher",
    "contact",
    "access_endpoints",
    "created",
    "modified",
)


class CanonicalParseError(ValueError):
    """Malformed canonical document (not valid JSON)."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class CanonicalSchemaError(ValueError):
    """Structurally valid JSON that violates the canonical record schema."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class UnknownFieldWarning(UserWarning):
    """Canonical document carried keys outside the record schema."""


def utc_second(value: datetime) -> datetime:
    """Normalize an instant to UTC with seconds precision; naive input is taken as UTC."""
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).replace(microsecond=0)


def format_instant(value: datetime) -> str:
    return utc_second(value).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_instant(text: str) -> datetime:
    # Python 3.10 fromisoformat rejects the Z suffix.
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return utc_second(datetime.fromisoformat(text))


@dataclass(frozen=True)
class GeographicBoundingBox:
    """Lat/lon extent in decimal degrees; west/east in [-180, 180], south/north in [-90, 90]."""

    west: float
    east: float
    south: float
    north: float

    def __post_init__(self):
        for name in ("west", "east", "south", "north"):
            value = getattr(self, name)
            if isinstance(value, int) and not isinstance(value, bool):
                object.__setattr__(self, name, float(value))

    def violations(self) -> list[str]:
        out = []
        for name in ("west", "east", "south", "north"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or value != value:
                out.append(f"{name} is not a number")
        if out:
            return out
        if not -180.0 <= self.west <= 180.0:
            out.append("west outside [-180, 180]")
        if not -180.0 <= self.east <= 180.0:
            out.append("east outside [-180, 180]")
        if self.west > self.east:
            out.append("west exceeds east")
        if not -90.0 <= self.south <= 90.0:
            out.append("south outside [-90, 90]")
        if not -90.0 <= self.north <= 90.0:
            out.append("north outside [-90, 90]")
        if self.south > self.north:
            out.append("south exceeds north")
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def intersects(self, other: "GeographicBoundingBox") -> bool:
        # Closed-set semantics: boundary touching counts.
        return (
            self.west <= other.east
            and other.west <= self.east
            and self.south <= other.north
            and other.south <= self.north
        )

    def within(self, outer: "GeographicBoundingBox") -> bool:
        # Boundary contact allowed; a box is within itself.
        return (
            outer.west <= self.west
            and self.east <= outer.east
            and outer.south <= self.south
            and self.north <= outer.north
        )


def _as_tuple(value) -> tuple:
    if value is None:
        return ()
    return tuple(value)


@dataclass(frozen=True)
class MetadataRecord:
    """Canonical description of one geospatial resource (dataset, service, map, or tool).

    The constructor is deliberately permissive: invariants (id non-empty, bbox
    ordering, temporal ordering, endpoint URL syntax) are checked by
    ``record_violations`` / ``validate_record`` so that broken records can be
    represented and reported on, not just rejected.
    """

    id: str
    resource_type: str
    title: str = ""
    abstract: str = ""
    keywords: tuple[str, ...] = ()
    topic_category: str = ""
    bbox: GeographicBoundingBox | None = None
    temporal_extent: tuple[datetime, datetime] | None = None
    crs_list: tuple[str, ...] = ()
    lineage: str = ""
    publisher: str = ""
    contact: str = ""
    access_endpoints: tuple[tuple[str, str], ...] = ()
    created: datetime = field(default=None)  # type: ignore[assignment]
    modified: datetime = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "keywords", _as_tuple(self.keywords))
        object.__setattr__(self, "crs_list", _as_tuple(self.crs_list))
        object.__setattr__(
            self, "access_endpoints", tuple(tuple(ep) for ep in _as_tuple(self.access_endpoints))
        )
        now = utc_second(datetime.now(timezone.utc))
        object.__setattr__(self, "created", utc_second(self.created) if self.created else now)
        object.__setattr__(self, "modified", utc_second(self.modified) if self.modified else now)
        if self.temporal_extent is not None:
            start, end = self.temporal_extent
            object.__setattr__(self, "temporal_extent", (utc_second(start), utc_second(end)))


@dataclass(frozen=True)
class MetadataProfile:
    """Named subset of record fields split into mandatory and recommended tiers."""

    name: str
    mandatory_fields: tuple[str, ...]
    recommended_fields: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "mandatory_fields", tuple(self.mandatory_fields))
        object.__setattr__(self, "recommended_fields", tuple(self.recommended_fields))
        overlap = set(self.mandatory_fields) & set(self.recommended_fields)
        if overlap:
            raise ValueError(f"fields in both tiers: {sorted(overlap)}")
        unknown = (set(self.mandatory_fields) | set(self.recommended_fields)) - set(CANONICAL_FIELDS)
        if unknown:
            raise ValueError(f"unknown record fields: {sorted(unknown)}")


# Default reduced profile; acceptance tests pin this composition.
SDI_BASIC = MetadataProfile(
    name="sdi-basic",
    mandatory_fields=("id", "title", "abstract", "resource_type", "bbox", "publisher"),
    recommended_fields=(
        "keywords",
        "topic_category",
        "temporal_extent",
        "crs_list",
        "lineage",
        "access_endpoints",
        "contact",
    ),
)

PROFILES = {SDI_BASIC.name: SDI_BASIC}

# Weight of a recommended field relative to a mandatory one in completeness scoring.
RECOMMENDED_WEIGHT = 0.5


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    missing_mandatory: tuple[str, ...]
    missing_recommended: tuple[str, ...]
    violations: tuple[tuple[str, str], ...]
    completeness: float


def is_populated(record: MetadataRecord, field_name: str) -> bool:
    value = getattr(record, field_name)
    if value is None:
        return False
    if isinstance(value, str):
        return bool(value.strip())
    if isinstance(value, tuple) and field_name != "temporal_extent":
        return len(value) > 0
    return True


def _is_absolute_url(url: str) -> bool:
    try:
        parts = urlsplit(url)
    except ValueError:
        return False
    return bool(parts.scheme) and bool(parts.netloc)


def record_violations(record: MetadataRecord) -> list[tuple[str, str]]:
    """Type-level invariant violations, as (field, message) pairs."""
    out: list[tuple[str, str]] = []
    if not record.id or not record.id.strip():
        out.append(("id", "id must be non-empty"))
    if record.resource_type not in RESOURCE_TYPES:
        out.append(("resource_type", f"must be one of {sorted(RESOURCE_TYPES)}"))
    if record.bbox is not None:
        for message in record.bbox.violations():
            out.append(("bbox", message))
    if record.temporal_extent is not None:
        start, end = record.temporal_extent
        if start > end:
            out.append(("temporal_extent", "start exceeds end"))
    for protocol, url in record.access_endpoints:
        if not _is_absolute_url(url):
            out.append(("access_endpoints", f"not an absolute URL: {url!r}"))
    return out


def completeness_score(record: MetadataRecord, profile: MetadataProfile) -> float:
    """(populated mandatory + w * populated recommended) / (mandatory + w * recommended)."""
    populated_mandatory = sum(1 for f in profile.mandatory_fields if is_populated(record, f))
    populated_recommended = sum(1 for f in profile.recommended_fields if is_populated(record, f))
    denominator = len(profile.mandatory_fields) + RECOMMENDED_WEIGHT * len(profile.recommended_fields)
    if denominator == 0:
        return 1.0
    return (populated_mandatory + RECOMMENDED_WEIGHT * populated_recommended) / denominator


def validate_record(record: MetadataRecord, profile: MetadataProfile) -> ValidationReport:
    missing_mandatory = tuple(f for f in profile.mandatory_fields if not is_populated(record, f))
    missing_recommended = tuple(f for f in profile.recommended_fields if not is_populated(record, f))
    violations = tuple(record_violations(record))
    return ValidationReport(
        valid=not missing_mandatory and not violations,
        missing_mandatory=missing_mandatory,
        missing_recommended=missing_recommended,
        violations=violations,
        completeness=completeness_score(record, profile),
    )


def report_to_payload(report: ValidationReport) -> dict:
    return {
        "valid": report.valid,
        "missing_mandatory": list(report.missing_mandatory),
        "missing_recommended": list(report.missing_recommended),
        "violations": [{"field": f, "message": m} for f, m in report.violations],
        "completeness": report.completeness,
    }


def record_to_payload(record: MetadataRecord) -> dict:
    """Record as the canonical JSON object (plain dict, fixed key order)."""
    bbox = None
    if record.bbox is not None:
        bbox = {
            "west": record.bbox.west,
            "east": record.bbox.east,
            "south": record.bbox.south,
            "north": record.bbox.north,
        }
    temporal = None
    if record.temporal_extent is not None:
        temporal = {
            "start": format_instant(record.temporal_extent[0]),
            "end": format_instant(record.temporal_extent[1]),
        }
    return {
        "id": record.id,
        "resource_type": record.resource_type,
        "title": record.title,
        "abstract": record.abstract,
        "keywords": list(record.keywords),
        "topic_category": record.topic_category,
        "bbox": bbox,
        "temporal_extent": temporal,
        "crs_list": list(record.crs_list),
        "lineage": record.lineage,
        "publisher": record.publisher,
        "contact": record.contact,
        "access_endpoints": [{"protocol": p, "url": u} for p, u in record.access_endpoints],
        "created": format_instant(record.created),
        "modified": format_instant(record.modified),
    }


def to_canonical(record: MetadataRecord) -> str:
    """Canonical UTF-8 JSON document, one line, fixed key order."""
    return json.dumps(record_to_payload(record), ensure_ascii=False, separators=(",", ":"))


def _expect(value, types, field_name: str):
    if not isinstance(value, types):
        raise CanonicalSchemaError(field_name, f"expected {types}, got {type(value).__name__}")
    return value


def _parse_text(obj: dict, name: str) -> str:
    value = obj.get(name, "")
    if value is None:
        return ""
    return _expect(value, str, name)


def _parse_text_list(obj: dict, name: str) -> tuple[str, ...]:
    value = obj.get(name, [])
    if value is None:
        return ()
    _expect(value, list, name)
    return tuple(_expect(item, str, f"{name}[{i}]") for i, item in enumerate(value))


def _parse_number(value, field_name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CanonicalSchemaError(field_name, "expected a number")
    return float(value)


def _parse_instant_field(value, field_name: str) -> datetime:
    _expect(value, str, field_name)
    try:
        return parse_instant(value)
    except ValueError as exc:
        raise CanonicalSchemaError(field_name, f"not an ISO-8601 instant: {exc}") from exc


def payload_to_record(obj: dict) -> MetadataRecord:
    """Validate a parsed canonical object and build the record.

    Raises CanonicalSchemaError naming the offending field; unknown keys are
    ignored with an UnknownFieldWarning (forward compatibility).
    """
    _expect(obj, dict, "document")
    unknown = sorted(set(obj) - set(CANONICAL_FIELDS))
    if unknown:
        warnings.warn(f"ignoring unknown fields: {unknown}", UnknownFieldWarning, stacklevel=2)

    record_id = _expect(obj.get("id", ""), str, "id")
    if not record_id.strip():
        raise CanonicalSchemaError("id", "id must be non-empty")
    resource_type = _expect(obj.get("resource_type", ""), str, "resource_type")
    if resource_type not in RESOURCE_TYPES:
        raise CanonicalSchemaError("resource_type", f"must be one of {sorted(RESOURCE_TYPES)}")

    bbox = None
    raw_bbox = obj.get("bbox")
    if raw_bbox is not None:
        _expect(raw_bbox, dict, "bbox")
        values = {}
        for side in ("west", "east", "south", "north"):
            if side not in raw_bbox:
                raise CanonicalSchemaError(f"bbox.{side}", "missing")
            values[side] = _parse_number(raw_bbox[side], f"bbox.{side}")
        bbox = GeographicBoundingBox(**values)
        for message in bbox.violations():
            side = message.split(" ", 1)[0]
            raise CanonicalSchemaError(f"bbox.{side}", message)

    temporal = None
    raw_temporal = obj.get("temporal_extent")
    if raw_temporal is not None:
        _expect(raw_temporal, dict, "temporal_extent")
        for key in ("start", "end"):
            if key not in raw_temporal:
                raise CanonicalSchemaError(f"temporal_extent.{key}", "missing")
        start = _parse_instant_field(raw_temporal["start"], "temporal_extent.start")
        end = _parse_instant_field(raw_temporal["end"], "temporal_extent.end")
        if start > end:
            raise CanonicalSchemaError("temporal_extent", "start exceeds end")
        temporal = (start, end)

    endpoints = []
    raw_endpoints = obj.get("access_endpoints", [])
    if raw_endpoints is None:
        raw_endpoints = []
    _expect(raw_endpoints, list, "access_endpoints")
    for i, entry in enumerate(raw_endpoints):
        _expect(entry, dict, f"access_endpoints[{i}]")
        protocol = _expect(entry.get("protocol", ""), str, f"access_endpoints[{i}].protocol")
        url = _expect(entry.get("url", ""), str, f"access_endpoints[{i}].url")
        if not _is_absolute_url(url):
            raise CanonicalSchemaError(f"access_endpoints[{i}].url", f"not an absolute URL: {url!r}")
        endpoints.append((protocol, url))

    now = format_instant(datetime.now(timezone.utc))
    return MetadataRecord(
        id=record_id,
        resource_type=resource_type,
        title=_parse_text(obj, "title"),
        abstract=_parse_text(obj, "abstract"),
        keywords=_parse_text_list(obj, "keywords"),
        topic_category=_parse_text(obj, "topic_category"),
        bbox=bbox,
        temporal_extent=temporal,
        crs_list=_parse_text_list(obj, "crs_list"),
        lineage=_parse_text(obj, "lineage"),
        publisher=_parse_text(obj, "publisher"),
        contact=_parse_text(obj, "contact"),
        access_endpoints=tuple(endpoints),
        created=_parse_instant_field(obj.get("created", now), "created"),
        modified=_parse_instant_field(obj.get("modified", now), "modified"),
    )


def from_canonical(document: str) -> MetadataRecord:
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as exc:
        raise CanonicalParseError(exc.msg, exc.lineno, exc.colno) from exc
    return payload_to_record(obj)


def with_refreshed_modified(record: MetadataRecord, *, created: datetime | None = None) -> MetadataRecord:
    """Copy with modified=now; optionally carry over an earlier created instant."""
    now = utc_second(datetime.now(timezone.utc))
    if created is not None:
        return replace(record, modified=now, created=utc_second(created))
    return replace(record, modified=now)


# Text fields that feed the catalog's inverted index and search scoring.
TEXT_FIELDS = ("title", "abstract", "keywords", "topic_category", "lineage", "publisher", "contact")


def field_text(record: MetadataRecord, field_name: str) -> str:
    value = getattr(record, field_name)
    if isinstance(value, tuple):
        return " ".join(value)
    return value or ""


def record_field_names() -> tuple[str, ...]:
    return tuple(f.name for f in fields(MetadataRecord))
