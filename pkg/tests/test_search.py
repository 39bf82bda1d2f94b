import math
import random
from datetime import datetime, timezone

import pytest

from sdi.catalog import Catalog, SpatialRelation
from sdi.metadata import GeographicBoundingBox
from sdi.search import (
    InvalidQueryError,
    SearchQuery,
    UnknownFieldError,
    facet_counts,
    search,
)
from sdi.thesaurus import build_thesaurus, parse_thesaurus

from conftest import WORDS, make_record, rand_bbox, rand_record


@pytest.fixture
def catalog(tmp_path):
    with Catalog(tmp_path / "cat") as cat:
        yield cat


@pytest.fixture
def seeded(catalog):
    rng = random.Random(101)
    records = [rand_record(rng, i) for i in range(150)]
    for record in records:
        catalog.upsert(record)
    return catalog, [catalog.get(r.id) for r in records]


def _keyword(text, **kw):
    return SearchQuery(text=text, mode="keyword", **kw)


def test_keyword_search_finds_exactly_matching_records(seeded):
    catalog, records = seeded
    expected = {
        r.id
        for r in records
        if any(
            "watershed" in field.lower()
            for field in (r.title, r.abstract, " ".join(r.keywords), r.topic_category)
        )
    }
    total, results = search(catalog, _keyword("watershed", page_size=100))
    assert total == len(expected)
    assert {r.id for r in results} == expected
    assert all("watershed" in r.matched_terms for r in results)


def test_results_sorted_by_score_then_id(seeded):
    catalog, _ = seeded
    _, results = search(catalog, _keyword("river boundary", page_size=100))
    keys = [(-r.score, r.id) for r in results]
    assert keys == sorted(keys)


def test_determinism(seeded):
    catalog, _ = seeded
    query = _keyword("river imagery", page_size=50)
    first = search(catalog, query)
    second = search(catalog, query)
    assert first == second


def test_paging_integrity(catalog):
    rng = random.Random(303)
    for i in range(30):
        catalog.upsert(rand_record(rng, i))
    unpaged_total, unpaged = search(catalog, _keyword("soil climate terrain", page_size=100))
    assert unpaged_total == len(unpaged) <= 100
    paged = []
    page = 0
    while True:
        total, chunk = search(catalog, _keyword("soil climate terrain", page=page, page_size=7))
        assert total == unpaged_total
        if not chunk:
            break
        paged.extend(chunk)
        page += 1
    assert paged == unpaged


def test_score_membership_soundness(seeded):
    catalog, _ = seeded
    total, results = search(catalog, _keyword("elevation wetland", page_size=100))
    for result in results:
        assert result.matched_terms
        assert result.score > 0


def test_snippet_limited_to_200_chars(catalog):
    catalog.upsert(make_record(abstract="x" * 500))
    _, results = search(catalog, _keyword("watershed"))
    assert len(results[0].snippet) == 200


def test_blank_text_browses_all_records(seeded):
    catalog, records = seeded
    total, results = search(
        catalog, SearchQuery(facet_filters=(("resource_type", "dataset"),), page_size=100)
    )
    expected = {r.id for r in records if r.resource_type == "dataset"}
    assert {r.id for r in results} == expected
    assert all(r.score == 0.0 for r in results)


def test_stopword_only_text_matches_nothing(seeded):
    catalog, _ = seeded
    total, results = search(catalog, _keyword("the and was"))
    assert total == 0
    assert results == []


def test_spatial_filter_equals_set_intersection(seeded):
    catalog, _ = seeded
    box = GeographicBoundingBox(-125.0, -66.0, 24.0, 50.0)
    plain_total, plain = search(catalog, _keyword("river", page_size=100))
    filtered_total, filtered = search(
        catalog,
        _keyword("river", spatial=(box, SpatialRelation.INTERSECTS), page_size=100),
    )
    spatial_ids = catalog.spatial_query(box, SpatialRelation.INTERSECTS)
    assert {r.id for r in filtered} == {r.id for r in plain} & spatial_ids


def test_temporal_filter_closed_overlap(catalog):
    def extent(y0, y1):
        return (
            datetime(y0, 1, 1, tzinfo=timezone.utc),
            datetime(y1, 12, 31, tzinfo=timezone.utc),
        )

    catalog.upsert(make_record("before", temporal_extent=extent(1990, 1994)))
    catalog.upsert(make_record("touching", temporal_extent=extent(1980, 2000)))
    catalog.upsert(make_record("inside", temporal_extent=extent(2001, 2002)))
    catalog.upsert(make_record("undated", temporal_extent=None))
    query = SearchQuery(
        temporal=(
            datetime(2000, 12, 31, tzinfo=timezone.utc),
            datetime(2005, 1, 1, tzinfo=timezone.utc),
        ),
        page_size=10,
    )
    total, results = search(catalog, query)
    assert {r.id for r in results} == {"touching", "inside"}


def test_undated_records_pass_without_temporal_filter(catalog):
    catalog.upsert(make_record("undated", temporal_extent=None))
    total, _ = search(catalog, _keyword("watershed"))
    assert total == 1


def test_facet_filter_commutes_with_spatial(seeded):
    catalog, _ = seeded
    box = GeographicBoundingBox(-100.0, 0.0, 0.0, 60.0)
    spatial_then_facet = search(
        catalog,
        SearchQuery(
            text="",
            spatial=(box, SpatialRelation.INTERSECTS),
            facet_filters=(("publisher", "USGS"),),
            page_size=100,
        ),
    )
    # Same filters, same answer regardless of construction order.
    facet_then_spatial = search(
        catalog,
        SearchQuery(
            text="",
            facet_filters=(("publisher", "USGS"),),
            spatial=(box, SpatialRelation.INTERSECTS),
            page_size=100,
        ),
    )
    assert {r.id for r in spatial_then_facet[1]} == {r.id for r in facet_then_spatial[1]}


def test_tfidf_rarity_outranks_ubiquity(catalog):
    # Three documents; "aquifer" appears in 1 of 3, "river" in all 3.
    # Equal tf and field, so the ranking reduces to ln(1+3/2) vs ln(1+3/4).
    catalog.upsert(make_record("d1", title="aquifer river", abstract="", keywords=()))
    catalog.upsert(make_record("d2", title="river", abstract="", keywords=()))
    catalog.upsert(make_record("d3", title="river", abstract="", keywords=()))
    _, rare = search(catalog, _keyword("aquifer"))
    _, common = search(catalog, _keyword("river"))
    assert rare[0].score == pytest.approx(3.0 * math.log(1 + 3 / 2))
    assert common[0].score == pytest.approx(3.0 * math.log(1 + 3 / 4))
    assert rare[0].score > common[0].score


def test_field_boosts_order_matches(catalog):
    catalog.upsert(make_record("in-title", title="aquifer", abstract="", keywords=()))
    catalog.upsert(make_record("in-keywords", title="x", abstract="", keywords=("aquifer",)))
    catalog.upsert(make_record("in-abstract", title="x", abstract="aquifer", keywords=()))
    catalog.upsert(make_record("in-lineage", title="x", abstract="", keywords=(), lineage="aquifer"))
    _, results = search(catalog, _keyword("aquifer"))
    assert [r.id for r in results] == ["in-title", "in-keywords", "in-abstract", "in-lineage"]
    ratios = [r.score for r in results]
    assert ratios[0] / ratios[2] == pytest.approx(3.0)
    assert ratios[1] / ratios[2] == pytest.approx(2.0)
    assert ratios[3] / ratios[2] == pytest.approx(0.5)


# -- semantic mode ---------------------------------------------------------------


ROAD_THESAURUS = parse_thesaurus(
    "road\tprefLabel\troad\nroad\taltLabel\tstreet\n"
    "disaster\tprefLabel\tnatural disaster\n"
    "earthquake\tprefLabel\tearthquake\nearthquake\tbroader\tdisaster\n"
)


def test_road_query_misses_street_record_in_keyword_mode(catalog):
    catalog.upsert(make_record("street-rec", title="Street Centerlines", keywords=()))
    total, _ = search(catalog, SearchQuery(text="road", mode="keyword"), ROAD_THESAURUS)
    assert total == 0
    total, results = search(catalog, SearchQuery(text="road", mode="semantic"), ROAD_THESAURUS)
    assert total == 1
    assert results[0].id == "street-rec"
    assert "street" in results[0].matched_terms


def test_semantic_weights_scale_scores(catalog):
    catalog.upsert(make_record("street-rec", title="street", abstract="", keywords=()))
    catalog.upsert(make_record("road-rec", title="road", abstract="", keywords=()))
    _, results = search(catalog, SearchQuery(text="road", mode="semantic"), ROAD_THESAURUS)
    by_id = {r.id: r.score for r in results}
    # Same tf/idf/field; the synonym match is decayed by 0.8.
    assert by_id["street-rec"] / by_id["road-rec"] == pytest.approx(0.8)


def test_broad_query_reaches_narrower_records(catalog):
    catalog.upsert(make_record("quake", title="Earthquake Epicenters", keywords=()))
    keyword_total, _ = search(
        catalog, SearchQuery(text="natural disasters", mode="keyword"), ROAD_THESAURUS
    )
    semantic_total, results = search(
        catalog, SearchQuery(text="natural disasters", mode="semantic"), ROAD_THESAURUS
    )
    assert keyword_total == 0
    assert semantic_total == 1
    assert results[0].id == "quake"


def _random_thesaurus(rng):
    concepts = rng.sample(WORDS, 8)
    pref = {c: c for c in concepts}
    alt = {}
    broader = {}
    for concept in concepts[1:]:
        if rng.random() < 0.5:
            alt.setdefault(concept, set()).add(rng.choice(WORDS))
        if rng.random() < 0.6:
            # Parent strictly earlier in the list keeps the relation acyclic.
            parent = concepts[rng.randrange(concepts.index(concept))]
            broader.setdefault(concept, set()).add(parent)
    return build_thesaurus(pref, alt, broader)


def test_semantic_superset_property(tmp_path):
    rng = random.Random(77)
    for round_number in range(15):
        with Catalog(tmp_path / f"cat-{round_number}") as catalog:
            for i in range(rng.randint(5, 40)):
                catalog.upsert(rand_record(rng, i))
            thesaurus = _random_thesaurus(rng)
            text = " ".join(rng.sample(WORDS, rng.randint(1, 3)))
            _, keyword_results = search(
                catalog, SearchQuery(text=text, mode="keyword", page_size=100), thesaurus
            )
            _, semantic_results = search(
                catalog, SearchQuery(text=text, mode="semantic", page_size=100), thesaurus
            )
            assert {r.id for r in keyword_results} <= {r.id for r in semantic_results}


# -- facets ---------------------------------------------------------------------


def test_facet_counts_direct(catalog):
    catalog.upsert(make_record("a", resource_type="dataset"))
    catalog.upsert(make_record("b", resource_type="dataset"))
    catalog.upsert(make_record("c", resource_type="service"))
    counts = facet_counts(catalog, SearchQuery(text="watershed"), "resource_type")
    assert counts == [("dataset", 2), ("service", 1)]


def test_facet_counts_empty_field(catalog):
    catalog.upsert(make_record("a", topic_category=""))
    assert facet_counts(catalog, SearchQuery(text="watershed"), "topic_category") == []


def test_facet_counts_recount_oracle(seeded):
    catalog, records = seeded
    counts = dict(facet_counts(catalog, _keyword("river terrain"), "publisher"))
    recount = {}
    page = 0
    while True:  # walk every page so the recount covers the full result set
        _, results = search(catalog, _keyword("river terrain", page=page, page_size=100))
        if not results:
            break
        for result in results:
            publisher = catalog.get(result.id).publisher
            if publisher:
                recount[publisher] = recount.get(publisher, 0) + 1
        page += 1
    assert counts == recount


def test_facet_counts_cover_full_set_not_page(seeded):
    catalog, _ = seeded
    small_page = SearchQuery(text="", facet_filters=(("resource_type", "dataset"),), page_size=1)
    counts = dict(facet_counts(catalog, small_page, "resource_type"))
    total, _ = search(catalog, small_page)
    assert counts.get("dataset", 0) == total


def test_facet_counts_unknown_field(catalog):
    with pytest.raises(UnknownFieldError):
        facet_counts(catalog, SearchQuery(text="x"), "title")


# -- query validation -------------------------------------------------------------


def test_empty_query_rejected(catalog):
    with pytest.raises(InvalidQueryError):
        search(catalog, SearchQuery())


def test_bad_page_size_rejected(catalog):
    with pytest.raises(InvalidQueryError):
        search(catalog, SearchQuery(text="x", page_size=0))
    with pytest.raises(InvalidQueryError):
        search(catalog, SearchQuery(text="x", page_size=101))


def test_bad_mode_rejected(catalog):
    with pytest.raises(InvalidQueryError):
        search(catalog, SearchQuery(text="x", mode="vibes"))


def test_unknown_facet_field_rejected(catalog):
    with pytest.raises(UnknownFieldError):
        search(catalog, SearchQuery(facet_filters=(("title", "x"),)))


def test_invalid_spatial_box_rejected(catalog):
    bad = GeographicBoundingBox(10.0, -10.0, 0.0, 1.0)
    with pytest.raises(InvalidQueryError):
        search(catalog, SearchQuery(spatial=(bad, SpatialRelation.INTERSECTS)))
