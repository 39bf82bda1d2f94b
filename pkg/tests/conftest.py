"""Shared fixtures: record generators, a capabilities fixture document, and a
small threaded HTTP server that logs requests for harvester tests."""

from __future__ import annotations

import random
import threading
import time
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from sdi.metadata import GeographicBoundingBox, MetadataRecord

FIXTURES = Path(__file__).parent / "fixtures"

WORDS = [
    "watershed", "boundary", "river", "elevation", "landcover", "transport",
    "road", "soil", "climate", "hydrology", "terrain", "imagery", "parcel",
    "zoning", "census", "geology", "wetland", "floodplain", "aquifer", "canopy",
]

PUBLISHERS = ["USGS", "NOAA", "State GIS Office", "City Data Desk"]

RESOURCE_TYPES = ["dataset", "service", "map", "tool"]


def make_record(record_id="rec-1", **overrides) -> MetadataRecord:
    """A record that validates under sdi-basic; override any field."""
    values = dict(
        id=record_id,
        resource_type="dataset",
        title="Watershed Boundaries",
        abstract="Hydrologic unit boundaries for the region.",
        keywords=("hydrology", "watershed"),
        topic_category="inlandWaters",
        bbox=GeographicBoundingBox(-120.0, -110.0, 30.0, 40.0),
        publisher="USGS",
        crs_list=("EPSG:4326",),
        access_endpoints=(("WMS", "https://example.org/wms"),),
    )
    values.update(overrides)
    return MetadataRecord(**values)


def rand_bbox(rng: random.Random) -> GeographicBoundingBox:
    west, east = sorted(round(rng.uniform(-180.0, 180.0), 6) for _ in range(2))
    south, north = sorted(round(rng.uniform(-90.0, 90.0), 6) for _ in range(2))
    return GeographicBoundingBox(west=west, east=east, south=south, north=north)


def rand_record(rng: random.Random, index: int, *, with_bbox: bool | None = None) -> MetadataRecord:
    if with_bbox is None:
        with_bbox = rng.random() < 0.85
    title = " ".join(rng.sample(WORDS, rng.randint(1, 3))).title()
    temporal = None
    if rng.random() < 0.4:
        start_year = rng.randint(1980, 2015)
        span = rng.randint(0, 20)
        temporal = (
            datetime(start_year, 1, 1, tzinfo=timezone.utc),
            datetime(start_year + span, 12, 31, tzinfo=timezone.utc),
        )
    return MetadataRecord(
        id=f"rec-{index:05d}",
        resource_type=rng.choice(RESOURCE_TYPES),
        title=title,
        abstract=" ".join(rng.choices(WORDS, k=rng.randint(3, 10))),
        keywords=tuple(rng.sample(WORDS, rng.randint(0, 3))),
        topic_category=rng.choice(WORDS),
        bbox=rand_bbox(rng) if with_bbox else None,
        temporal_extent=temporal,
        crs_list=("EPSG:4326",) if rng.random() < 0.7 else (),
        publisher=rng.choice(PUBLISHERS),
        access_endpoints=(("WMS", f"https://data.example.org/wms/{index}"),)
        if rng.random() < 0.6
        else (),
        created=datetime(2020, 1, 1, tzinfo=timezone.utc),
        modified=datetime(2020, 1, 2, tzinfo=timezone.utc),
    )


@pytest.fixture
def capabilities_xml() -> str:
    return (FIXTURES / "capabilities_global.xml").read_text("utf-8")


class FixtureHttpServer:
    """Serves registered documents and records (path, monotonic time) per request."""

    def __init__(self):
        self.documents: dict[str, bytes] = {}
        self.request_log: list[tuple[str, float]] = []
        self.handler_delay = 0.0
        self.max_inflight = 0
        self._inflight = 0
        self._lock = threading.Lock()

        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_GET(self):
                with outer._lock:
                    outer.request_log.append((self.path, time.monotonic()))
                    outer._inflight += 1
                    outer.max_inflight = max(outer.max_inflight, outer._inflight)
                try:
                    if outer.handler_delay:
                        time.sleep(outer.handler_delay)
                    if self.path.startswith("/redirect/"):
                        hops = int(self.path.rsplit("/", 1)[1])
                        target = "/doc/caps.xml" if hops <= 1 else f"/redirect/{hops - 1}"
                        self.send_response(302)
                        self.send_header("Location", target)
                        self.end_headers()
                        return
                    body = outer.documents.get(self.path)
                    if body is None:
                        self.send_response(404)
                        self.end_headers()
                        return
                    self.send_response(200)
                    self.send_header("Content-Type", "text/xml; charset=utf-8")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                finally:
                    with outer._lock:
                        outer._inflight -= 1

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def url(self, path: str) -> str:
        return self.base_url + path

    def times_for(self, path: str) -> list[float]:
        return [t for p, t in self.request_log if p == path]

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)


@pytest.fixture
def http_server():
    server = FixtureHttpServer()
    yield server
    server.stop()


@pytest.fixture
def capabilities_server(http_server, capabilities_xml):
    http_server.documents["/doc/caps.xml"] = capabilities_xml.encode("utf-8")
    return http_server
