"""Word-level similarity between short texts.

Texts are compared as word sequences, not character strings. All similarity
values are normalized to [0, 1] by the length of the longer sequence. The
functions here are pure and safe to call from multiple threads.
"""

from __future__ import annotations

import string
from enum import Enum
from typing import Mapping, Sequence

# characters stripped from both ends of each token; '#' and '@' survive so
# hashtags and mentions keep their marker
_STRIP = "".join(c for c in string.punctuation if c not in "#@") + "“”‘’«»…–—"

WordSequence = Sequence[str]


class SimilarityMetric(Enum):
    SUBSEQUENCE = "subsequence"
    SUBSTRING = "substring"
    EDIT = "edit"


def tokenize(text: str) -> list[str]:
    """Split a text into lowercase word tokens.

    Splits on whitespace, strips surrounding punctuation from each token
    (keeping '#' and '@'), and drops tokens that end up empty.

    >>> tokenize("law and order #Debates")
    ['law', 'and', 'order', '#debates']
    """
    out = []
    for raw in text.lower().split():
        tok = raw.strip(_STRIP)
        if tok:
            out.append(tok)
    return out


def lcs_subsequence_words(a: WordSequence, b: WordSequence) -> int:
    """Length of the longest common subsequence of two word sequences."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for wa in a:
        cur = [0]
        for j, wb in enumerate(b, start=1):
            if wa == wb:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def lcs_substring_words(a: WordSequence, b: WordSequence) -> int:
    """Length of the longest contiguous run of words shared by a and b."""
    if not a or not b:
        return 0
    best = 0
    prev = [0] * (len(b) + 1)
    for wa in a:
        cur = [0]
        for j, wb in enumerate(b, start=1):
            run = prev[j - 1] + 1 if wa == wb else 0
            cur.append(run)
            if run > best:
                best = run
        prev = cur
    return best


def edit_distance_words(a: WordSequence, b: WordSequence) -> int:
    """Levenshtein distance over words (insert, delete, substitute)."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, wa in enumerate(a, start=1):
        cur = [i]
        for j, wb in enumerate(b, start=1):
            cost = 0 if wa == wb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def nsim(a: WordSequence, b: WordSequence, metric: SimilarityMetric) -> float:
    """Normalized word-level similarity in [0, 1].

    Common-subsequence and common-substring lengths are divided by the longer
    sequence length. Edit distance is mapped through 1 - distance / longer
    length so that identical sequences score 1 and disjoint ones score 0.

    Raises ValueError when both sequences are empty, where similarity is
    undefined.
    """
    if not a and not b:
        raise ValueError("similarity is undefined for two empty word sequences")
    longest = max(len(a), len(b))
    if metric is SimilarityMetric.SUBSEQUENCE:
        return lcs_subsequence_words(a, b) / longest
    if metric is SimilarityMetric.SUBSTRING:
        return lcs_substring_words(a, b) / longest
    if metric is SimilarityMetric.EDIT:
        return 1.0 - edit_distance_words(a, b) / longest
    raise ValueError(f"unknown metric: {metric!r}")


class PairSimilarity:
    """Memoized nsim over a fixed id -> words table.

    Tweets are compared many times across workers and train sizes, so pair
    similarities are cached under a symmetric key. Two empty sequences are
    treated as identical (similarity 1.0) to keep pipelines total.
    """

    def __init__(self, words_by_id: Mapping[str, WordSequence], metric: SimilarityMetric):
        self._words = words_by_id
        self._metric = metric
        self._cache: dict[tuple[str, str], float] = {}

    def sim(self, id_a: str, id_b: str) -> float:
        key = (id_a, id_b) if id_a <= id_b else (id_b, id_a)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        a = self._words[id_a]
        b = self._words[id_b]
        value = 1.0 if not a and not b else nsim(a, b, self._metric)
        self._cache[key] = value
        return value
