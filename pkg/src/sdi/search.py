"""Keyword/semantic search over a catalog: query expansion, tf-idf ranking,
spatial/temporal/facet filtering, and facet counts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

from .catalog import Catalog, SpatialRelation
from .metadata import GeographicBoundingBox, MetadataRecord, utc_second
from .text import tokenize
from .thesaurus import Thesaurus

# Ranking constants; acceptance tests pin these values.
FIELD_BOOSTS = {"title": 3.0, "keywords": 2.0, "abstract": 1.0}
DEFAULT_FIELD_BOOST = 0.5
EXPANSION_DECAY = 0.8
DEFAULT_EXPANSION_DEPTH = 2

FACET_FIELDS = ("resource_type", "publisher", "topic_category")

MAX_PAGE_SIZE = 100
SNIPPET_LIMIT = 200


class SearchError(Exception):
    pass


class InvalidQueryError(SearchError):
    pass


class UnknownFieldError(SearchError):
    pass


@dataclass(frozen=True)
class SearchQuery:
    text: str = ""
    mode: str = "keyword"
    spatial: tuple[GeographicBoundingBox, SpatialRelation] | None = None
    temporal: tuple[datetime, datetime] | None = None
    facet_filters: tuple[tuple[str, str], ...] = ()
    page: int = 0
    page_size: int = 10

    def __post_init__(self):
        object.__setattr__(self, "facet_filters", tuple(tuple(f) for f in self.facet_filters))
        if self.temporal is not None:
            start, end = self.temporal
            object.__setattr__(self, "temporal", (utc_second(start), utc_second(end)))

    def validate(self) -> None:
        if self.mode not in ("keyword", "semantic"):
            raise InvalidQueryError(f"unknown mode {self.mode!r}")
        if self.page < 0:
            raise InvalidQueryError("page must be non-negative")
        if not 1 <= self.page_size <= MAX_PAGE_SIZE:
            raise InvalidQueryError(f"page_size must be in [1, {MAX_PAGE_SIZE}]")
        if not (self.text.strip() or self.spatial or self.temporal or self.facet_filters):
            raise InvalidQueryError("query needs text, a spatial or temporal filter, or a facet")
        for field_name, _ in self.facet_filters:
            if field_name not in FACET_FIELDS:
                raise UnknownFieldError(f"not a facetable field: {field_name!r}")
        if self.spatial is not None:
            box, relation = self.spatial
            problems = box.violations()
            if problems:
                raise InvalidQueryError("; ".join(problems))
            if not isinstance(relation, SpatialRelation):
                raise InvalidQueryError(f"unknown relation {relation!r}")


@dataclass(frozen=True)
class SearchResult:
    id: str
    score: float
    matched_terms: frozenset[str]
    snippet: str


def expand_query(
    tokens: list[str], thesaurus: Thesaurus | None, depth: int = DEFAULT_EXPANSION_DEPTH
) -> dict[str, float]:
    """Weighted term set: original tokens at 1.0; labels of matched concepts
    (synonyms, one hop) at 0.8; labels of narrower concepts at 0.8^d for hop
    distance d <= depth. Deduplicated keeping the maximum weight."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    weights: dict[str, float] = {}

    def offer(term: str, weight: float) -> None:
        if weight > weights.get(term, 0.0):
            weights[term] = weight

    for token in tokens:
        offer(token, 1.0)
    if thesaurus is None or depth == 0:
        return weights

    for token in tokens:
        matched = thesaurus.concepts_for_token(token)
        if not matched:
            continue
        for concept in matched:
            for label in thesaurus.labels_of(concept):
                for term in tokenize(label):
                    offer(term, EXPANSION_DECAY)
        frontier = set(matched)
        seen = set(matched)
        for hop in range(1, depth + 1):
            frontier = {
                child for concept in frontier for child in thesaurus.narrower(concept)
            } - seen
            if not frontier:
                break
            seen |= frontier
            hop_weight = EXPANSION_DECAY**hop
            for concept in frontier:
                for label in thesaurus.labels_of(concept):
                    for term in tokenize(label):
                        offer(term, hop_weight)
    return weights


def _idf(total_records: int, document_frequency: int) -> float:
    return math.log(1.0 + total_records / (1.0 + document_frequency))


def _boost(field_name: str) -> float:
    return FIELD_BOOSTS.get(field_name, DEFAULT_FIELD_BOOST)


def _term_weights(query: SearchQuery, thesaurus: Thesaurus | None) -> dict[str, float]:
    tokens = tokenize(query.text)
    if query.mode == "semantic":
        return expand_query(tokens, thesaurus, DEFAULT_EXPANSION_DEPTH)
    return {token: 1.0 for token in tokens}


def _text_stage(
    catalog: Catalog, query: SearchQuery, thesaurus: Thesaurus | None
) -> dict[str, tuple[float, frozenset[str]]]:
    """id -> (score, matched terms) for the text part of the query.

    Blank text means filter-only browse: every record passes at score 0.
    Non-blank text that normalizes to zero tokens matches nothing.
    """
    if not query.text.strip():
        return {record_id: (0.0, frozenset()) for record_id in catalog.ids()}

    weights = _term_weights(query, thesaurus)
    total = len(catalog)
    scores: dict[str, float] = {}
    matched: dict[str, set[str]] = {}
    for term, weight in weights.items():
        postings = catalog.text_postings(term)
        if not postings:
            continue
        idf = _idf(total, catalog.document_frequency(term))
        for record_id, field_name, tf in postings:
            scores[record_id] = scores.get(record_id, 0.0) + weight * tf * idf * _boost(field_name)
            matched.setdefault(record_id, set()).add(term)
    return {
        record_id: (scores[record_id], frozenset(matched[record_id])) for record_id in scores
    }


def _passes_filters(record: MetadataRecord, query: SearchQuery) -> bool:
    if query.temporal is not None:
        if record.temporal_extent is None:
            return False
        start, end = record.temporal_extent
        query_start, query_end = query.temporal
        # Closed intervals: any shared instant counts as overlap.
        if start > query_end or query_start > end:
            return False
    for field_name, value in query.facet_filters:
        if getattr(record, field_name) != value:
            return False
    return True


def _matching_ids(
    catalog: Catalog, query: SearchQuery, thesaurus: Thesaurus | None
) -> dict[str, tuple[float, frozenset[str]]]:
    query.validate()
    candidates = _text_stage(catalog, query, thesaurus)
    if query.spatial is not None:
        box, relation = query.spatial
        allowed = catalog.spatial_query(box, relation)
        candidates = {rid: hit for rid, hit in candidates.items() if rid in allowed}
    out = {}
    for record_id, hit in candidates.items():
        record = catalog.get(record_id)
        if record is not None and _passes_filters(record, query):
            out[record_id] = hit
    return out


def _snippet(record: MetadataRecord) -> str:
    source = record.abstract.strip() or record.title.strip()
    return source[:SNIPPET_LIMIT]


def search(
    catalog: Catalog, query: SearchQuery, thesaurus: Thesaurus | None = None
) -> tuple[int, list[SearchResult]]:
    """Ranked search: (total matches, requested page of results)."""
    hits = _matching_ids(catalog, query, thesaurus)
    ranked = sorted(hits.items(), key=lambda item: (-item[1][0], item[0]))
    total = len(ranked)
    start = query.page * query.page_size
    page = ranked[start : start + query.page_size]
    results = []
    for record_id, (score, terms) in page:
        record = catalog.get(record_id)
        results.append(
            SearchResult(
                id=record_id,
                score=score,
                matched_terms=terms,
                snippet=_snippet(record) if record else "",
            )
        )
    return total, results


def facet_counts(
    catalog: Catalog,
    query: SearchQuery,
    field_name: str,
    thesaurus: Thesaurus | None = None,
) -> list[tuple[str, int]]:
    """Value counts of one facetable field over the full filtered result set."""
    if field_name not in FACET_FIELDS:
        raise UnknownFieldError(f"not a facetable field: {field_name!r}")
    hits = _matching_ids(catalog, query, thesaurus)
    counts: dict[str, int] = {}
    for record_id in hits:
        record = catalog.get(record_id)
        if record is None:
            continue
        value = getattr(record, field_name)
        if value:
            counts[value] = counts.get(value, 0) + 1
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))
