"""Classifier inputs: fused text corpus, tokenizer encoding and the fixed

22-feature metadata vector (engagement counts, sentiment, ratios and the
publisher's profile-similarity scores)."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources as importlib_resources

import numpy as np

from . import textprep
from .porter import stem_fixed_point
from .records import PostRecord, ProfileRecord
from .segmentation import SegmentationDictionary, default_dictionary, segment_compound
from .similarity import SimilarityReport

VOCAB_CAP = 30000

METADATA_FEATURE_NAMES = (
    "like_count",
    "comment_count",
    "tagged_users_count",
    "mention_users_count",
    "hashtag_count",
    "caption_sentiment",
    "hashtag_sentiment",
    "media_type",
    "emoji_count",
    "has_url",
    "date_age_days",
    "sim_username",
    "sim_full_name",
    "sim_biography",
    "sim_photo",
    "follower",
    "followee",
    "post_count",
    "following_followers_ratio",
    "followers_posts_ratio",
    "bio_emoji_count",
    "bio_hashtag_count",
)

METADATA_DIM = len(METADATA_FEATURE_NAMES)


@lru_cache(maxsize=1)
def load_lexicon():
    """Bundled valence lexicon (`word TAB valence`).

    Each entry is also registered under its stemmed form so scores can be
    looked up for normalized (stemmed) tokens; surface entries win on
    collision.
    """
    text = importlib_resources.files("doppel.data").joinpath("sentiment_lexicon.tsv").read_text("utf-8")
    lexicon = {}
    stemmed = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        word, value = line.split("\t")
        lexicon[word] = float(value)
        stemmed.setdefault(stem_fixed_point(word), float(value))
    for word, value in stemmed.items():
        lexicon.setdefault(word, value)
    return lexicon


def sentiment(tokens: list[str], lexicon: dict[str, float] | None = None) -> float:
    """Mean valence of the tokens found in the lexicon; 0.0 if none match."""
    if lexicon is None:
        lexicon = load_lexicon()
    values = [lexicon[t] for t in tokens if t in lexicon]
    if not values:
        return 0.0
    return float(np.mean(values))


def ratio(numerator: float, denominator: float) -> float:
    """numerator / denominator with the documented zero guard:

    a zero denominator is replaced by denominator + 1."""
    if denominator == 0:
        denominator = denominator + 1
    return numerator / denominator


@dataclass
class Vocabulary:
    """Token index 1..V by descending corpus frequency, ties by first

    occurrence. Index 0 is padding, index V+1 is out-of-vocabulary."""

    token_to_index: dict[str, int]

    @property
    def size(self) -> int:
        return len(self.token_to_index)

    @property
    def oov_index(self) -> int:
        return self.size + 1

    def index(self, token: str) -> int:
        return self.token_to_index.get(token, self.oov_index)

    def tokens_by_index(self) -> list[str]:
        ordered = sorted(self.token_to_index.items(), key=lambda kv: kv[1])
        return [tok for tok, _ in ordered]

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.serialize())

    def serialize(self) -> str:
        lines = [f"{tok}\t{idx}" for tok, idx in
                 sorted(self.token_to_index.items(), key=lambda kv: kv[1])]
        return "\n".join(lines) + ("\n" if lines else "")

    def content_hash(self) -> str:
        return hashlib.sha256(self.serialize().encode("utf-8")).hexdigest()

    @classmethod
    def load(cls, path):
        mapping = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                tok, idx = line.rstrip("\n").split("\t")
                mapping[tok] = int(idx)
        return cls(mapping)


def fit_vocabulary(corpus: list[str], cap: int = VOCAB_CAP) -> Vocabulary:
    """Rank whitespace tokens by frequency (ties by first occurrence)."""
    if not corpus:
        raise ValueError("cannot fit a vocabulary on an empty corpus")
    counts: dict[str, int] = {}
    first_seen: dict[str, int] = {}
    position = 0
    for doc in corpus:
        for tok in doc.split():
            counts[tok] = counts.get(tok, 0) + 1
            if tok not in first_seen:
                first_seen[tok] = position
                position += 1
    ranked = sorted(counts, key=lambda t: (-counts[t], first_seen[t]))[:cap]
    return Vocabulary({tok: i + 1 for i, tok in enumerate(ranked)})


def encode(text: str, vocab: Vocabulary, length: int) -> np.ndarray:
    """Token ids padded with 0 (or truncated) at the tail to `length`."""
    ids = [vocab.index(tok) for tok in text.split()][:length]
    ids += [0] * (length - len(ids))
    return np.array(ids, dtype=np.int64)


def decode(ids, vocab: Vocabulary) -> list[str]:
    """Inverse of encode for in-vocabulary ids; padding is stripped."""
    by_index = {idx: tok for tok, idx in vocab.token_to_index.items()}
    return [by_index[i] for i in ids if i in by_index]


@dataclass
class TextResources:
    """Immutable preprocessing assets shared by corpus and feature builders."""

    stopwords: frozenset = field(default_factory=textprep.load_stopwords)
    dictionary: SegmentationDictionary = field(default_factory=default_dictionary)
    lexicon: dict = field(default_factory=load_lexicon)


def _clean_handle(handle: str) -> str:
    return "".join(ch for ch in handle.lower() if ch.isalnum())


def _segment_handle(handle: str, dictionary) -> list[str]:
    cleaned = _clean_handle(handle)
    if not cleaned:
        return []
    return segment_compound(cleaned, dictionary)


def _segment_name(name: str, dictionary) -> list[str]:
    tokens = []
    for part in name.lower().split():
        tokens.extend(_segment_handle(part, dictionary))
    return tokens


def normalized_tokens(text: str, resources: TextResources) -> list[str]:
    """Entity replacement, emoji conversion, then normalization."""
    return textprep.normalize(
        textprep.demojize(textprep.replace_entities(text)),
        stopwords=resources.stopwords,
    )


def build_corpus_entry(
    post: PostRecord,
    profile: ProfileRecord,
    resources: TextResources | None = None,
    topic_words: tuple[str, ...] = (),
) -> str:
    """Fuse one post and its publisher into a single text document.

    Fixed field order: caption tokens, segmented hashtags, segmented
    mentions, biography tokens, segmented username and full-name tokens,
    then topic words. Order is part of the contract.
    """
    if resources is None:
        resources = TextResources()
    parts: list[str] = []
    parts += normalized_tokens(post.caption, resources)
    for tag in post.hashtags:
        parts += _segment_handle(tag, resources.dictionary)
    for mention in post.mentions:
        parts += _segment_handle(mention, resources.dictionary)
    parts += normalized_tokens(profile.biography, resources)
    parts += _segment_handle(profile.username, resources.dictionary)
    parts += _segment_name(profile.full_name, resources.dictionary)
    parts += list(topic_words)
    return " ".join(parts)


def metadata_vector(
    post: PostRecord,
    profile: ProfileRecord,
    report: SimilarityReport,
    reference_ts: int,
    resources: TextResources | None = None,
) -> np.ndarray:
    """The fixed-order numeric feature vector for one post."""
    if resources is None:
        resources = TextResources()
    caption_tokens = normalized_tokens(post.caption, resources)
    hashtag_tokens = []
    for tag in post.hashtags:
        hashtag_tokens += _segment_handle(tag, resources.dictionary)
    bio_hashtags, _ = textprep.extract_tags(profile.biography)
    age_days = max(0.0, (reference_ts - post.timestamp) / 86400.0)
    return np.array([
        float(post.like_count),
        float(post.comment_count),
        float(len(post.tagged_users)),
        float(len(post.mentions)),
        float(len(post.hashtags)),
        sentiment(caption_tokens, resources.lexicon),
        sentiment(hashtag_tokens, resources.lexicon),
        1.0 if post.media_type == "video" else 0.0,
        float(post.emoji_count),
        1.0 if post.has_url else 0.0,
        age_days,
        report.sim_username,
        report.sim_full_name,
        report.sim_biography,
        1.0 if report.photo_similar else 0.0,
        float(profile.follower_count),
        float(profile.followee_count),
        float(profile.media_count),
        ratio(profile.followee_count, profile.follower_count),
        ratio(profile.follower_count, profile.media_count),
        float(textprep.count_emoji(profile.biography)),
        float(len(bio_hashtags)),
    ], dtype=float)
