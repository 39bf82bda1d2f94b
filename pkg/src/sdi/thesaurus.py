"""Concept thesaurus: preferred labels, synonyms, and broader/narrower links.

File format (UTF-8, one assertion per line, '#' comments):

    concept <TAB> prefLabel <TAB> label
    concept <TAB> altLabel  <TAB> label
    concept <TAB> broader   <TAB> concept

Loading rejects cycles in the broader relation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from .text import tokenize


class ThesaurusError(ValueError):
    pass


class ThesaurusFormatError(ThesaurusError):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ThesaurusCycleError(ThesaurusError):
    pass


@dataclass(frozen=True)
class Thesaurus:
    """Immutable concept graph. Lookup is case-insensitive; labels are also
    indexed by their normalized tokens so that stemmed query tokens match."""

    concepts: frozenset[str]
    pref_label: Mapping[str, str]
    alt_labels: Mapping[str, frozenset[str]]
    broader: Mapping[str, frozenset[str]]
    _narrower: Mapping[str, frozenset[str]] = field(repr=False, default_factory=dict)
    _by_label: Mapping[str, frozenset[str]] = field(repr=False, default_factory=dict)
    _by_token: Mapping[str, frozenset[str]] = field(repr=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.concepts)

    def labels_of(self, concept: str) -> set[str]:
        out = set(self.alt_labels.get(concept, ()))
        pref = self.pref_label.get(concept)
        if pref:
            out.add(pref)
        return out

    def narrower(self, concept: str) -> frozenset[str]:
        return self._narrower.get(concept, frozenset())

    def concepts_for_label(self, label: str) -> frozenset[str]:
        return self._by_label.get(label.lower(), frozenset())

    def concepts_for_token(self, token: str) -> frozenset[str]:
        """Concepts whose label equals the token or contains it as a normalized token."""
        exact = self._by_label.get(token.lower(), frozenset())
        by_token = self._by_token.get(token, frozenset())
        return exact | by_token


def build_thesaurus(
    pref_labels: Mapping[str, str],
    alt_labels: Mapping[str, Iterable[str]] | None = None,
    broader: Mapping[str, Iterable[str]] | None = None,
) -> Thesaurus:
    alt_labels = alt_labels or {}
    broader = broader or {}

    concepts = set(pref_labels) | set(alt_labels) | set(broader)
    for parents in broader.values():
        concepts.update(parents)

    broader_map = {c: frozenset(broader.get(c, ())) for c in concepts}
    _check_acyclic(broader_map)

    alt_map = {c: frozenset(alt_labels.get(c, ())) for c in concepts}
    narrower: dict[str, set[str]] = {c: set() for c in concepts}
    for child, parents in broader_map.items():
        for parent in parents:
            narrower[parent].add(child)

    by_label: dict[str, set[str]] = {}
    by_token: dict[str, set[str]] = {}
    for concept in concepts:
        labels = set(alt_map[concept])
        pref = pref_labels.get(concept)
        if pref:
            labels.add(pref)
        for label in labels:
            by_label.setdefault(label.lower(), set()).add(concept)
            for token in tokenize(label):
                by_token.setdefault(token, set()).add(concept)

    return Thesaurus(
        concepts=frozenset(concepts),
        pref_label=MappingProxyType(dict(pref_labels)),
        alt_labels=MappingProxyType(alt_map),
        broader=MappingProxyType(broader_map),
        _narrower=MappingProxyType({c: frozenset(children) for c, children in narrower.items()}),
        _by_label=MappingProxyType({k: frozenset(v) for k, v in by_label.items()}),
        _by_token=MappingProxyType({k: frozenset(v) for k, v in by_token.items()}),
    )


def _check_acyclic(broader: Mapping[str, frozenset[str]]) -> None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {c: WHITE for c in broader}
    for start in broader:
        if color[start] != WHITE:
            continue
        stack = [(start, iter(broader.get(start, ())))]
        color[start] = GRAY
        while stack:
            node, edges = stack[-1]
            advanced = False
            for parent in edges:
                state = color.get(parent, WHITE)
                if state == GRAY:
                    raise ThesaurusCycleError(f"broader cycle through {parent!r}")
                if state == WHITE:
                    color[parent] = GRAY
                    stack.append((parent, iter(broader.get(parent, ()))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()


def parse_thesaurus(text: str) -> Thesaurus:
    pref: dict[str, str] = {}
    alt: dict[str, set[str]] = {}
    broader: dict[str, set[str]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) != 3:
            raise ThesaurusFormatError(number, f"expected 3 tab-separated fields, got {len(parts)}")
        subject, predicate, obj = (p.strip() for p in parts)
        if not subject or not obj:
            raise ThesaurusFormatError(number, "empty concept or label")
        if predicate == "prefLabel":
            pref[subject] = obj
        elif predicate == "altLabel":
            alt.setdefault(subject, set()).add(obj)
        elif predicate == "broader":
            broader.setdefault(subject, set()).add(obj)
        else:
            raise ThesaurusFormatError(number, f"unknown predicate {predicate!r}")
    return build_thesaurus(pref, alt, broader)


def load_thesaurus(path: str | Path) -> Thesaurus:
    return parse_thesaurus(Path(path).read_text("utf-8"))
