"""Text normalization shared by the inverted index and the search engine."""

from __future__ import annotations

import re
from importlib import resources

# Unicode alphanumeric runs; underscore is a separator like any other symbol.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_MIN_TOKEN_LEN = 2
_STRIP_S_MIN_LEN = 4


def _load_stopwords() -> frozenset[str]:
    data = resources.files("sdi").joinpath("data/stopwords.txt").read_text("utf-8")
    words = [line.strip() for line in data.splitlines()]
    return frozenset(w for w in words if w and not w.startswith("#"))


STOPWORDS = _load_stopwords()


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop short tokens and stopwords,
    then singularize by stripping one trailing 's' from tokens of length >= 4."""
    tokens = []
    for raw in _TOKEN_RE.findall(text.lower()):
        if len(raw) < _MIN_TOKEN_LEN or raw in STOPWORDS:
            continue
        if len(raw) >= _STRIP_S_MIN_LEN and raw.endswith("s"):
            raw = raw[:-1]
        tokens.append(raw)
    return tokens
