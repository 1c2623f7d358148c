"""Compound-word splitting for hashtags and usernames.

Dynamic programming over split points with a Zipf-style cost: a known word
of rank r in a dictionary of N words costs log(r * log N); a span with no
dictionary parse pays a large per-character penalty, so unknown runs
coalesce into single tokens and any dictionary word beats them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources as importlib_resources


@dataclass(frozen=True)
class SegmentationDictionary:
    """Frequency-ranked wordlist: rank = line number, lookups lowercase."""

    ranks: dict[str, int]
    total: int
    max_word_len: int

    def rank(self, word):
        return self.ranks.get(word.lower())

    def __contains__(self, word):
        return word.lower() in self.ranks


def load_dictionary(path=None) -> SegmentationDictionary:
    """Load a wordlist file (one word per line, most frequent first)."""
    if path is None:
        text = importlib_resources.files("doppel.data").joinpath("wordlist.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    ranks = {}
    for line in text.splitlines():
        word = line.strip().lower()
        if word and word not in ranks:
            ranks[word] = len(ranks) + 1
    if not ranks:
        raise ValueError("segmentation dictionary is empty")
    max_len = max(len(w) for w in ranks)
    return SegmentationDictionary(ranks=ranks, total=len(ranks), max_word_len=max_len)


@lru_cache(maxsize=1)
def default_dictionary() -> SegmentationDictionary:
    return load_dictionary()


def _word_cost(dictionary, word):
    rank = dictionary.rank(word)
    if rank is None:
        return None
    return math.log(rank * math.log(dictionary.total))


def _unknown_char_cost(dictionary):
    # strictly worse than the worst-ranked dictionary word, per character
    return math.log(dictionary.total * math.log(dictionary.total)) + 5.0


def segment_compound(word: str, dictionary: SegmentationDictionary | None = None) -> list[str]:
    """Split a lowercase alphanumeric string into dictionary words.

    Returns the minimum-cost segmentation; ties keep the earliest split
    found, so the result is deterministic. Spans that no dictionary word
    covers come back as single unknown tokens. The output always
    concatenates back to the input.
    """
    if dictionary is None:
        dictionary = default_dictionary()
    n = len(word)
    if n == 0:
        return []
    unk = _unknown_char_cost(dictionary)
    best = [math.inf] * (n + 1)
    parent = [-1] * (n + 1)
    best[0] = 0.0
    max_len = dictionary.max_word_len
    for i in range(1, n + 1):
        for j in range(max(0, i - max_len), i):
            cost = _word_cost(dictionary, word[j:i])
            if cost is not None and best[j] + cost < best[i]:
                best[i] = best[j] + cost
                parent[i] = j
        # unknown span [j:i], flat term makes longer unknown runs cheaper
        # than the same characters split across several unknown tokens
        for j in range(0, i):
            cost = unk * (i - j + 1)
            if best[j] + cost < best[i]:
                best[i] = best[j] + cost
                parent[i] = j
    tokens = []
    i = n
    while i > 0:
        j = parent[i]
        tokens.append(word[j:i])
        i = j
    tokens.reverse()
    return tokens
