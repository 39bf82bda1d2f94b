"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line. Run with `pytest tests/test_acceptance.py -v -s`."""

import json
import random
import socket
import threading
import time
from contextlib import contextmanager
from dataclasses import replace

import pytest
import requests
import uvicorn

from sdi.api import create_app, render_json, search_envelope
from sdi.capabilities import CrsBoundingBox, parse_capabilities
from sdi.catalog import Catalog, SpatialRelation
from sdi.harvest import HarvestJob, harvest
from sdi.metadata import (
    GeographicBoundingBox,
    from_canonical,
    record_to_payload,
    to_canonical,
)
from sdi.search import SearchQuery, search
from sdi.text import tokenize
from sdi.thesaurus import build_thesaurus, parse_thesaurus

from conftest import WORDS, make_record, rand_bbox, rand_record


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {name}: FAIL")
        raise
    print(f"\nACCEPTANCE {name}: PASS")


# 1 ---------------------------------------------------------------------------


def test_golden_capabilities_parse(capabilities_xml):
    with criterion("golden capabilities parse"):
        started = time.monotonic()
        service = parse_capabilities(capabilities_xml, "https://maps.example.gov/wms")
        elapsed = time.monotonic() - started
        assert elapsed < 1.0, f"parse took {elapsed:.3f}s"

        (layer,) = service.layers
        assert layer.crs_list == ("CRS:84", "EPSG:4326", "EPSG:3857", "EPSG:102100")
        for got, want in zip(
            (layer.geographic_bbox.west, layer.geographic_bbox.south,
             layer.geographic_bbox.east, layer.geographic_bbox.north),
            (-179.999996, -89.0, 179.999996, 89.0),
        ):
            assert abs(got - want) <= 1e-9
        by_crs = {b.crs: b for b in layer.crs_bboxes}
        assert by_crs["EPSG:4326"] == CrsBoundingBox(
            "EPSG:4326", -89.0, -179.999996, 89.0, 179.999996
        )
        assert "GetStyles" in service.operations


# 2 ---------------------------------------------------------------------------


def test_spatial_oracle_equivalence(tmp_path):
    with criterion("spatial index equals linear-scan oracle (1000x100x2)"):
        started = time.monotonic()
        rng = random.Random(2024)
        records = [rand_record(rng, i) for i in range(1000)]
        with Catalog(tmp_path / "cat") as catalog:
            for record in records:
                catalog.upsert(record)
            with_bbox = [r for r in records if r.bbox is not None]
            for _ in range(100):
                box = rand_bbox(rng)
                intersects = catalog.spatial_query(box, SpatialRelation.INTERSECTS)
                within = catalog.spatial_query(box, SpatialRelation.WITHIN)
                assert intersects == {r.id for r in with_bbox if r.bbox.intersects(box)}
                assert within == {r.id for r in with_bbox if r.bbox.within(box)}
                assert within <= intersects
        elapsed = time.monotonic() - started
        assert elapsed < 10.0, f"spatial oracle suite took {elapsed:.1f}s"


# 3 ---------------------------------------------------------------------------


def _random_thesaurus(rng):
    concepts = rng.sample(WORDS, rng.randint(4, 10))
    pref = {c: c for c in concepts}
    alt = {}
    broader = {}
    for index, concept in enumerate(concepts):
        if rng.random() < 0.5:
            alt.setdefault(concept, set()).add(rng.choice(WORDS))
        if index > 0 and rng.random() < 0.6:
            broader.setdefault(concept, set()).add(concepts[rng.randrange(index)])
    return build_thesaurus(pref, alt, broader)


def test_semantic_superset_property(tmp_path):
    with criterion("semantic-mode ids are a superset of keyword-mode ids (200 triples)"):
        rng = random.Random(31)
        triples = 0
        for corpus_number in range(20):
            with Catalog(tmp_path / f"cat-{corpus_number}") as catalog:
                for i in range(rng.randint(10, 60)):
                    catalog.upsert(rand_record(rng, i))
                thesaurus = _random_thesaurus(rng)
                for _ in range(10):
                    text = " ".join(rng.sample(WORDS, rng.randint(1, 3)))
                    keyword_query = SearchQuery(text=text, mode="keyword", page_size=100)
                    semantic_query = SearchQuery(text=text, mode="semantic", page_size=100)
                    _, keyword_hits = search(catalog, keyword_query, thesaurus)
                    _, semantic_hits = search(catalog, semantic_query, thesaurus)
                    assert {r.id for r in keyword_hits} <= {r.id for r in semantic_hits}
                    triples += 1
        assert triples == 200


# 4 ---------------------------------------------------------------------------


def test_road_street_repair(tmp_path):
    with criterion("semantic search repairs the road/street vocabulary mismatch"):
        thesaurus = parse_thesaurus("road\tprefLabel\troad\nroad\taltLabel\tstreet\n")
        with Catalog(tmp_path / "cat") as catalog:
            catalog.upsert(
                make_record(
                    "street-rec",
                    title="Street Centerlines",
                    abstract="Centerline geometry for the city street network.",
                    keywords=("street",),
                    topic_category="transportation",
                )
            )
            catalog.upsert(
                make_record(
                    "river-rec",
                    title="River Reaches",
                    abstract="Hydrography flowlines.",
                    keywords=("hydrology",),
                )
            )

            keyword_total, _ = search(
                catalog, SearchQuery(text="road", mode="keyword"), thesaurus
            )
            assert keyword_total == 0  # keyword matching cannot bridge the vocabulary gap

            semantic_total, semantic_hits = search(
                catalog, SearchQuery(text="road", mode="semantic"), thesaurus
            )
            assert semantic_total == 1
            assert semantic_hits[0].id == "street-rec"

            # Same repair in the opposite direction via the synonym link.
            catalog.upsert(
                make_record(
                    "road-rec",
                    title="Road Network",
                    abstract="Arterial roads.",
                    keywords=("road",),
                    topic_category="transportation",
                )
            )
            keyword_total, _ = search(
                catalog, SearchQuery(text="street", mode="keyword"), thesaurus
            )
            semantic_total, hits = search(
                catalog, SearchQuery(text="street", mode="semantic"), thesaurus
            )
            assert keyword_total == 1
            assert semantic_total == 2
            assert {h.id for h in hits} == {"street-rec", "road-rec"}


# 5 ---------------------------------------------------------------------------


class _PortalServer:
    def __init__(self, catalog):
        with socket.socket() as sock:
            sock.bind(("127.0.0.1", 0))
            self.port = sock.getsockname()[1]
        app = create_app(catalog)
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="error")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self):
        self.thread.start()
        deadline = time.monotonic() + 15
        while time.monotonic() < deadline:
            try:
                requests.get(self.url("/health"), timeout=1)
                return self
            except requests.RequestException:
                time.sleep(0.05)
        raise RuntimeError("portal server did not start")

    def url(self, path):
        return f"http://127.0.0.1:{self.port}{path}"

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(timeout=10)


def test_publish_find_bind_closure_over_http(tmp_path):
    with criterion("publish-find-bind closure over HTTP (100 records)"):
        started = time.monotonic()
        rng = random.Random(47)
        records = []
        for i in range(100):
            record = rand_record(rng, i, with_bbox=True)
            if not record.access_endpoints:
                record = replace(
                    record, access_endpoints=(("WMS", f"https://bind.example.org/{i}"),)
                )
            records.append(record)

        with Catalog(tmp_path / "cat") as catalog:
            with _PortalServer(catalog) as portal:
                for record in records:
                    response = requests.post(
                        portal.url("/records"), data=to_canonical(record).encode("utf-8"), timeout=5
                    )
                    assert response.status_code == 201, response.text

                for record in records:
                    token = tokenize(record.title)[0]
                    bbox = record.bbox
                    params = {
                        "q": token,
                        "bbox": f"{bbox.west},{bbox.south},{bbox.east},{bbox.north}",
                        "relation": "intersects",
                        "page_size": "100",
                    }
                    envelope = requests.get(portal.url("/search"), params=params, timeout=5).json()
                    assert record.id in {r["id"] for r in envelope["results"]}

                    access = requests.get(
                        portal.url(f"/records/{record.id}/access"), timeout=5
                    ).json()
                    assert access["endpoints"] == [
                        {"protocol": p, "url": u} for p, u in record.access_endpoints
                    ]
        elapsed = time.monotonic() - started
        assert elapsed < 30.0, f"closure test took {elapsed:.1f}s"


# 6 ---------------------------------------------------------------------------


def _comparable_state(catalog):
    state = set()
    for record in catalog.records():
        payload = record_to_payload(record)
        payload.pop("modified")
        state.add(json.dumps(payload, sort_keys=True))
    return state


def test_harvest_idempotence(tmp_path, capabilities_server):
    with criterion("harvesting the fixture server twice is idempotent"):
        url = capabilities_server.url("/doc/caps.xml")
        job = HarvestJob(seed_urls=(url,), publisher_label="Example Agency")
        with Catalog(tmp_path / "cat") as catalog:
            first = harvest(catalog, job)
            assert first.outcomes[url].status == "ok"
            assert (first.outcomes[url].records_added, first.outcomes[url].records_updated) == (1, 0)
            state_after_first = _comparable_state(catalog)

            second = harvest(catalog, job)
            assert second.outcomes[url].status == "ok"
            assert (second.outcomes[url].records_added, second.outcomes[url].records_updated) == (0, 1)
            assert _comparable_state(catalog) == state_after_first


# 7 ---------------------------------------------------------------------------


def test_round_trip_and_durability(tmp_path):
    with criterion("canonical round-trip (1000 records) and close/reopen durability"):
        rng = random.Random(99)
        records = [rand_record(rng, i) for i in range(1000)]
        for record in records:
            assert from_canonical(to_canonical(record)) == record

        probe_boxes = [rand_bbox(rng) for _ in range(20)]
        probe_terms = ["river", "watershed", "terrain", "soil", "imagery"]
        directory = tmp_path / "cat"
        with Catalog(directory) as catalog:
            for record in records[:400]:
                catalog.upsert(record)
            catalog.delete(records[7].id)
            version = catalog.version
            spatial_answers = [
                catalog.spatial_query(box, relation)
                for box in probe_boxes
                for relation in SpatialRelation
            ]
            text_answers = [catalog.text_postings(term) for term in probe_terms]
            envelope = search_envelope(
                catalog, SearchQuery(text="river terrain", page_size=50)
            )

        with Catalog(directory) as reopened:
            assert reopened.version == version
            assert [
                reopened.spatial_query(box, relation)
                for box in probe_boxes
                for relation in SpatialRelation
            ] == spatial_answers
            assert [reopened.text_postings(term) for term in probe_terms] == text_answers
            assert (
                search_envelope(reopened, SearchQuery(text="river terrain", page_size=50))
                == envelope
            )
            assert reopened.audit() == []


# 8 ---------------------------------------------------------------------------


def test_search_determinism_byte_identical(tmp_path):
    with criterion("repeated searches return byte-identical envelopes"):
        rng = random.Random(13)
        with Catalog(tmp_path / "cat") as catalog:
            for i in range(80):
                catalog.upsert(rand_record(rng, i))
            queries = [
                SearchQuery(text="river boundary imagery", page_size=25),
                SearchQuery(text="terrain", mode="semantic", page_size=10),
                SearchQuery(
                    text="soil",
                    spatial=(GeographicBoundingBox(-120.0, 0.0, 0.0, 60.0), SpatialRelation.INTERSECTS),
                ),
            ]
            thesaurus = parse_thesaurus("terrain\tprefLabel\tterrain\nterrain\taltLabel\televation\n")
            for query in queries:
                first = render_json(search_envelope(catalog, query, thesaurus)).encode("utf-8")
                for _ in range(3):
                    again = render_json(search_envelope(catalog, query, thesaurus)).encode("utf-8")
                    assert again == first
