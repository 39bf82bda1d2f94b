from sdi.text import STOPWORDS, tokenize


def test_golden_tokenizations():
    assert tokenize("Watershed Boundaries") == ["watershed", "boundarie"]
    assert tokenize("natural disasters") == ["natural", "disaster"]
    assert tokenize("") == []


def test_short_tokens_dropped():
    assert tokenize("a b cd") == ["cd"]


def test_stopwords_dropped_before_singularizing():
    # "has" is a stopword and must not survive as "ha".
    assert tokenize("the map has rivers") == ["map", "river"]


def test_split_on_non_alphanumerics():
    assert tokenize("land-cover_2020 (v2)") == ["land", "cover", "2020", "v2"]


def test_unicode_lowercasing():
    assert tokenize("Straße ÉLÉVATION") == ["straße", "élévation"]


def test_trailing_s_only_for_len_4_plus():
    assert tokenize("gas maps") == ["gas", "map"]


def test_stoplist_is_exactly_thirty_words():
    assert len(STOPWORDS) == 30
