"""HTTP/JSON geoportal API: publish, find, and bind endpoints.

Every response is JSON. Errors always carry {status, code, message} with code
one of: malformed_request, validation_failed, not_found, harvest_in_progress,
internal. The /search envelope built here is also what the CLI prints with
--json, byte for byte.
"""

from __future__ import annotations

import json
import threading
import uuid
from typing import Mapping

from fastapi import FastAPI, Request, Response

from .catalog import Catalog, SpatialRelation
from .harvest import HarvestInProgressError, HarvestJob, HarvestReport, harvest
from .metadata import (
    CanonicalParseError,
    CanonicalSchemaError,
    GeographicBoundingBox,
    MetadataProfile,
    SDI_BASIC,
    from_canonical,
    parse_instant,
    report_to_payload,
    to_canonical,
    validate_record,
)
from .search import (
    FACET_FIELDS,
    InvalidQueryError,
    SearchQuery,
    UnknownFieldError,
    facet_counts,
    search,
)
from .thesaurus import Thesaurus

ENVELOPE_FACETS = ("resource_type", "publisher")

ERROR_CODES = (
    "malformed_request",
    "validation_failed",
    "not_found",
    "harvest_in_progress",
    "internal",
)


class ApiParamError(ValueError):
    pass


def render_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))


def json_response(payload, status_code: int = 200) -> Response:
    return Response(
        content=render_json(payload), status_code=status_code, media_type="application/json"
    )


def error_response(status_code: int, code: str, message: str, details=None) -> Response:
    body = {"status": status_code, "code": code, "message": message}
    if details is not None:
        body["details"] = details
    return json_response(body, status_code)


def parse_bbox_param(raw: str) -> GeographicBoundingBox:
    """bbox parameter is "west,south,east,north" in decimal degrees (lon-first)."""
    parts = raw.split(",")
    if len(parts) != 4:
        raise ApiParamError(f"bbox needs 4 comma-separated numbers, got {len(parts)}")
    try:
        west, south, east, north = (float(p) for p in parts)
    except ValueError:
        raise ApiParamError(f"bbox has a non-numeric part: {raw!r}") from None
    box = GeographicBoundingBox(west=west, east=east, south=south, north=north)
    problems = box.violations()
    if problems:
        raise ApiParamError("; ".join(problems))
    return box


def _parse_int(raw: str, name: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ApiParamError(f"{name} must be an integer, got {raw!r}") from None


def parse_search_params(params: Mapping[str, str], multi_items=None) -> SearchQuery:
    """Build a SearchQuery from /search query parameters.

    `multi_items` is an iterable of (key, value) pairs carrying repeated keys
    (facet.FIELD may appear more than once).
    """
    items = list(multi_items) if multi_items is not None else list(params.items())

    text = params.get("q", "")
    mode = params.get("mode", "keyword")
    if mode not in ("keyword", "semantic"):
        raise ApiParamError(f"mode must be keyword or semantic, got {mode!r}")

    spatial = None
    if "bbox" in params:
        box = parse_bbox_param(params["bbox"])
        relation_name = params.get("relation", "intersects")
        try:
            relation = SpatialRelation(relation_name)
        except ValueError:
            raise ApiParamError(
                f"relation must be intersects or within, got {relation_name!r}"
            ) from None
        spatial = (box, relation)
    elif "relation" in params:
        raise ApiParamError("relation requires bbox")

    temporal = None
    start_raw = params.get("time_start")
    end_raw = params.get("time_end")
    if (start_raw is None) != (end_raw is None):
        raise ApiParamError("time_start and time_end must be given together")
    if start_raw is not None and end_raw is not None:
        try:
            start = parse_instant(start_raw)
            end = parse_instant(end_raw)
        except ValueError as exc:
            raise ApiParamError(f"bad time filter: {exc}") from None
        if start > end:
            raise ApiParamError("time_start exceeds time_end")
        temporal = (start, end)

    facet_filters = []
    for key, value in items:
        if key.startswith("facet."):
            field_name = key[len("facet.") :]
            if field_name not in FACET_FIELDS:
                raise ApiParamError(f"not a facetable field: {field_name!r}")
            facet_filters.append((field_name, value))

    page = _parse_int(params.get("page", "0"), "page")
    page_size = _parse_int(params.get("page_size", "10"), "page_size")

    return SearchQuery(
        text=text,
        mode=mode,
        spatial=spatial,
        temporal=temporal,
        facet_filters=tuple(facet_filters),
        page=page,
        page_size=page_size,
    )


def bbox_payload(box: GeographicBoundingBox | None) -> dict | None:
    if box is None:
        return None
    return {"west": box.west, "east": box.east, "south": box.south, "north": box.north}


def search_envelope(
    catalog: Catalog, query: SearchQuery, thesaurus: Thesaurus | None = None
) -> dict:
    """The /search response body; shared verbatim by the CLI's --json output."""
    total, results = search(catalog, query, thesaurus)
    items = []
    for result in results:
        record = catalog.get(result.id)
        items.append(
            {
                "id": result.id,
                "title": record.title if record else "",
                "score": result.score,
                "snippet": result.snippet,
                "bbox": bbox_payload(record.bbox if record else None),
            }
        )
    facets = {}
    for field_name in ENVELOPE_FACETS:
        facets[field_name] = [
            {"value": value, "count": count}
            for value, count in facet_counts(catalog, query, field_name, thesaurus)
        ]
    return {
        "total": total,
        "page": query.page,
        "page_size": query.page_size,
        "results": items,
        "facets": facets,
    }


class _HarvestJobs:
    """At most one background harvest at a time; finished jobs stay readable."""

    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}
        self._active: str | None = None

    def start(self, catalog: Catalog, job: HarvestJob) -> str:
        with self._lock:
            if self._active is not None:
                raise HarvestInProgressError("a harvest job is already running")
            job_id = uuid.uuid4().hex
            self._jobs[job_id] = {"job_id": job_id, "status": "pending"}
            self._active = job_id
        thread = threading.Thread(
            target=self._run, args=(job_id, catalog, job), name=f"harvest-{job_id[:8]}", daemon=True
        )
        thread.start()
        return job_id

    def _run(self, job_id: str, catalog: Catalog, job: HarvestJob) -> None:
        with self._lock:
            self._jobs[job_id]["status"] = "running"
        try:
            report: HarvestReport = harvest(catalog, job)
            with self._lock:
                self._jobs[job_id]["status"] = "done"
                self._jobs[job_id]["report"] = report.to_payload()
        except Exception as exc:  # failures land in the job state, not the log
            with self._lock:
                self._jobs[job_id]["status"] = "failed"
                self._jobs[job_id]["error"] = str(exc)
        finally:
            with self._lock:
                self._active = None

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            state = self._jobs.get(job_id)
            return dict(state) if state is not None else None


def create_app(
    catalog: Catalog,
    *,
    thesaurus: Thesaurus | None = None,
    profile: MetadataProfile = SDI_BASIC,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="sdi-catalog portal", docs_url=None, redoc_url=None, openapi_url=None)
    jobs = _HarvestJobs()
    app.state.catalog = catalog
    app.state.thesaurus = thesaurus
    app.state.profile = profile

    @app.exception_handler(Exception)
    async def _internal_error(request: Request, exc: Exception) -> Response:
        return error_response(500, "internal", str(exc))

    @app.get("/health")
    async def health() -> Response:
        return json_response(
            {
                "status": "ok",
                "record_count": len(catalog),
                "catalog_version": catalog.version,
                "thesaurus_loaded": thesaurus is not None,
            }
        )

    @app.post("/records")
    async def publish_record(request: Request) -> Response:
        body = await request.body()
        try:
            record = from_canonical(body.decode("utf-8"))
        except (CanonicalParseError, CanonicalSchemaError, UnicodeDecodeError) as exc:
            return error_response(400, "malformed_request", str(exc))
        report = validate_record(record, profile)
        if not report.valid:
            return error_response(
                422, "validation_failed", "record fails the active profile",
                details=report_to_payload(report),
            )
        replacing = catalog.get(record.id) is not None
        catalog.upsert(record)
        return json_response({"id": record.id}, 200 if replacing else 201)

    @app.get("/records/{record_id}")
    async def get_record(record_id: str) -> Response:
        record = catalog.get(record_id)
        if record is None:
            return error_response(404, "not_found", f"no record with id {record_id!r}")
        return Response(content=to_canonical(record), media_type="application/json")

    @app.get("/records/{record_id}/access")
    async def get_access(record_id: str) -> Response:
        record = catalog.get(record_id)
        if record is None:
            return error_response(404, "not_found", f"no record with id {record_id!r}")
        endpoints = [{"protocol": p, "url": u} for p, u in record.access_endpoints]
        return json_response({"endpoints": endpoints})

    @app.get("/search")
    async def run_search(request: Request) -> Response:
        params = dict(request.query_params)
        try:
            query = parse_search_params(params, request.query_params.multi_items())
            envelope = search_envelope(catalog, query, thesaurus)
        except (ApiParamError, InvalidQueryError, UnknownFieldError) as exc:
            return error_response(400, "malformed_request", str(exc))
        return json_response(envelope)

    @app.post("/harvest")
    async def start_harvest(request: Request) -> Response:
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            return error_response(400, "malformed_request", f"malformed JSON: {exc.msg}")
        if not isinstance(body, dict):
            return error_response(400, "malformed_request", "body must be a JSON object")
        seeds = body.get("seed_urls")
        if not isinstance(seeds, list) or not seeds or not all(isinstance(s, str) for s in seeds):
            return error_response(400, "malformed_request", "seed_urls must be a non-empty list")
        publisher = body.get("publisher_label", "")
        if not isinstance(publisher, str):
            return error_response(400, "malformed_request", "publisher_label must be a string")
        try:
            job = HarvestJob(
                seed_urls=tuple(seeds),
                publisher_label=publisher,
                max_concurrent_fetches=int(body.get("max_concurrent_fetches", 4)),
                per_host_delay=float(body.get("per_host_delay", 0.0)),
                timeout=float(body.get("timeout", 10.0)),
            )
        except (ValueError, TypeError) as exc:
            return error_response(400, "malformed_request", str(exc))
        try:
            job_id = jobs.start(catalog, job)
        except HarvestInProgressError as exc:
            return error_response(409, "harvest_in_progress", str(exc))
        return json_response({"job_id": job_id}, 202)

    @app.get("/harvest/{job_id}")
    async def harvest_status(job_id: str) -> Response:
        state = jobs.get(job_id)
        if state is None:
            return error_response(404, "not_found", f"no harvest job {job_id!r}")
        return json_response(state)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
