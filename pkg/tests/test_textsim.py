"""Tokenization and the three word-level similarity metrics."""

import pytest
from hypothesis import given, strategies as st

from annodiff.textsim import (
    PairSimilarity,
    SimilarityMetric,
    edit_distance_words,
    lcs_subsequence_words,
    lcs_substring_words,
    nsim,
    tokenize,
)
from oracles import edit_distance_brute, lcs_subsequence_brute, lcs_substring_brute

TOKENIZE_CASES = [
    ("Law and order #Debates", ["law", "and", "order", "#debates"]),
    ("@potus, you're WRONG!", ["@potus", "you're", "wrong"]),
    ("“Fine.” He said… whatever —", ["fine", "he", "said", "whatever"]),
    ("#MAGA!!! vs. #maga", ["#maga", "vs", "#maga"]),
    ("  spaced\tout\nwords  ", ["spaced", "out", "words"]),
    ("(hello) [world] {now}", ["hello", "world", "now"]),
    ("co-op e.g. 'quoted'", ["co-op", "e.g", "quoted"]),
    ("...", []),
    ("", []),
    ("   \t\n ", []),
]


@pytest.mark.parametrize("text,expected", TOKENIZE_CASES)
def test_tokenize(text, expected):
    assert tokenize(text) == expected


def test_raw_lengths():
    a = "the cat sat on the mat".split()
    b = "the dog sat on a mat".split()
    assert lcs_subsequence_words(a, b) == 4  # the ... sat on ... mat
    assert lcs_substring_words(a, b) == 2  # "sat on"
    assert edit_distance_words(a, b) == 2


def test_raw_lengths_empty_side():
    assert lcs_subsequence_words([], ["x"]) == 0
    assert lcs_substring_words(["x"], []) == 0
    assert edit_distance_words([], ["x", "y"]) == 2
    assert edit_distance_words([], []) == 0


NSIM_CASES = [
    # (a, b, metric, expected)
    ("a b c", "a x c", SimilarityMetric.SUBSEQUENCE, 2 / 3),
    ("a b c", "a x c", SimilarityMetric.SUBSTRING, 1 / 3),
    ("a b c", "a x c", SimilarityMetric.EDIT, 2 / 3),
    ("a b c", "a b c", SimilarityMetric.SUBSEQUENCE, 1.0),
    ("a b c", "a b c", SimilarityMetric.SUBSTRING, 1.0),
    ("a b c", "a b c", SimilarityMetric.EDIT, 1.0),
    ("a b", "c d e", SimilarityMetric.SUBSEQUENCE, 0.0),
    ("a b", "c d e", SimilarityMetric.SUBSTRING, 0.0),
    ("a b", "c d e", SimilarityMetric.EDIT, 0.0),
    ("a b c", "b c", SimilarityMetric.SUBSTRING, 2 / 3),
    ("a b c d", "", SimilarityMetric.SUBSEQUENCE, 0.0),
    ("a b c d", "", SimilarityMetric.SUBSTRING, 0.0),
    ("a b c d", "", SimilarityMetric.EDIT, 0.0),
]


@pytest.mark.parametrize("a,b,metric,expected", NSIM_CASES)
def test_nsim_values(a, b, metric, expected):
    assert nsim(a.split(), b.split(), metric) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("metric", list(SimilarityMetric))
def test_nsim_both_empty_rejected(metric):
    with pytest.raises(ValueError):
        nsim([], [], metric)


words = st.lists(st.sampled_from(["a", "b", "c", "d"]), max_size=6)


@given(a=words, b=words)
def test_nsim_matches_oracles(a, b):
    if not a and not b:
        return
    longest = max(len(a), len(b))
    assert nsim(a, b, SimilarityMetric.SUBSEQUENCE) == lcs_subsequence_brute(a, b) / longest
    assert nsim(a, b, SimilarityMetric.SUBSTRING) == lcs_substring_brute(a, b) / longest
    assert nsim(a, b, SimilarityMetric.EDIT) == 1 - edit_distance_brute(a, b) / longest


@given(a=words, b=words, metric=st.sampled_from(list(SimilarityMetric)))
def test_nsim_symmetric_and_bounded(a, b, metric):
    if not a and not b:
        return
    value = nsim(a, b, metric)
    assert value == nsim(b, a, metric)
    assert 0.0 <= value <= 1.0


@given(a=words.filter(bool), metric=st.sampled_from(list(SimilarityMetric)))
def test_nsim_identity(a, metric):
    assert nsim(a, a, metric) == 1.0


def test_pair_similarity_cache():
    texts = {"t1": ("a", "b", "c"), "t2": ("a", "x", "c"), "t3": ()}
    sims = PairSimilarity(texts, SimilarityMetric.SUBSEQUENCE)
    assert sims.sim("t1", "t2") == nsim(texts["t1"], texts["t2"], SimilarityMetric.SUBSEQUENCE)
    assert sims.sim("t2", "t1") == sims.sim("t1", "t2")
    assert sims.sim("t1", "t1") == 1.0
    # two empty word sequences count as identical rather than undefined
    assert sims.sim("t3", "t3") == 1.0
    assert sims.sim("t1", "t3") == 0.0
