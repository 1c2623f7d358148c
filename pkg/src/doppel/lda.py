"""Latent Dirichlet Allocation via collapsed Gibbs sampling.

Small, deterministic implementation sized for desk-scale corpora: the
count bookkeeping lives in dense numpy arrays and the per-token sampling
loop is plain Python.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass
class TopicModel:
    """Fitted topic model: counts, hyperparameters and the vocabulary."""

    n_topics: int
    alpha: float
    beta: float
    vocabulary: list[str]
    topic_word_counts: np.ndarray   # K x V
    doc_topic_counts: np.ndarray    # D x K
    topic_totals: np.ndarray        # K
    doc_lengths: np.ndarray         # D

    def topic_word_dist(self) -> np.ndarray:
        """Per-topic word distributions (rows sum to 1)."""
        phi = self.topic_word_counts + self.beta
        return phi / phi.sum(axis=1, keepdims=True)

    def doc_topic_dist(self) -> np.ndarray:
        """Per-document topic distributions (rows sum to 1)."""
        theta = self.doc_topic_counts + self.alpha
        return theta / theta.sum(axis=1, keepdims=True)

    def top_words(self, topic: int, m: int = 5) -> list[str]:
        """The m highest-probability words of one topic."""
        order = np.argsort(-self.topic_word_counts[topic], kind="stable")[:m]
        return [self.vocabulary[i] for i in order]

    def infer(self, tokens: list[str]) -> np.ndarray:
        """Topic distribution for an unseen document.

        Deterministic fold-in: each known token contributes its word-topic
        posterior under the fitted model; unknown tokens are skipped.
        """
        index = {w: i for i, w in enumerate(self.vocabulary)}
        phi = self.topic_word_dist()
        theta = np.full(self.n_topics, self.alpha)
        for tok in tokens:
            w = index.get(tok)
            if w is None:
                continue
            post = phi[:, w]
            theta += post / post.sum()
        return theta / theta.sum()

    def dominant_topic(self, tokens: list[str]) -> int:
        return int(self.infer(tokens).argmax())

    def save(self, path):
        payload = {
            "n_topics": self.n_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "vocabulary": self.vocabulary,
            "topic_word_counts": self.topic_word_counts.tolist(),
            "doc_topic_counts": self.doc_topic_counts.tolist(),
            "topic_totals": self.topic_totals.tolist(),
            "doc_lengths": self.doc_lengths.tolist(),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        return cls(
            n_topics=payload["n_topics"],
            alpha=payload["alpha"],
            beta=payload["beta"],
            vocabulary=payload["vocabulary"],
            topic_word_counts=np.array(payload["topic_word_counts"], dtype=float),
            doc_topic_counts=np.array(payload["doc_topic_counts"], dtype=float),
            topic_totals=np.array(payload["topic_totals"], dtype=float),
            doc_lengths=np.array(payload["doc_lengths"], dtype=np.int64),
        )


def lda_fit(
    corpus: list[list[str]],
    n_topics: int = 10,
    alpha: float | None = None,
    beta: float = 0.01,
    iters: int = 200,
    seed: int = 0,
) -> TopicModel:
    """Collapsed Gibbs sampling over token-topic assignments.

    alpha defaults to 50 / n_topics. Deterministic under the seed. The
    corpus must have at least n_topics documents and as many distinct
    words as topics.
    """
    if alpha is None:
        alpha = 50.0 / n_topics
    docs = [list(doc) for doc in corpus]
    if len(docs) < n_topics:
        raise ValueError("corpus needs at least as many documents as topics")
    vocabulary = []
    index = {}
    for doc in docs:
        for tok in doc:
            if tok not in index:
                index[tok] = len(vocabulary)
                vocabulary.append(tok)
    if len(vocabulary) < n_topics:
        raise ValueError("vocabulary smaller than the number of topics")

    doc_ids, word_ids = [], []
    for d, doc in enumerate(docs):
        for tok in doc:
            doc_ids.append(d)
            word_ids.append(index[tok])
    doc_ids = np.array(doc_ids, dtype=np.int64)
    word_ids = np.array(word_ids, dtype=np.int64)
    n_tokens = len(word_ids)
    D, V, K = len(docs), len(vocabulary), n_topics

    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, size=n_tokens)
    topic_word = np.zeros((K, V))
    doc_topic = np.zeros((D, K))
    topic_totals = np.zeros(K)
    np.add.at(topic_word, (z, word_ids), 1.0)
    np.add.at(doc_topic, (doc_ids, z), 1.0)
    np.add.at(topic_totals, z, 1.0)

    v_beta = V * beta
    for _ in range(iters):
        if K == 1:
            break
        uniforms = rng.random(n_tokens)
        for i in range(n_tokens):
            d, w, t = doc_ids[i], word_ids[i], z[i]
            topic_word[t, w] -= 1.0
            doc_topic[d, t] -= 1.0
            topic_totals[t] -= 1.0
            p = (topic_word[:, w] + beta) / (topic_totals + v_beta) * (doc_topic[d] + alpha)
            cdf = np.cumsum(p)
            new_t = int(np.searchsorted(cdf, uniforms[i] * cdf[-1], side="right"))
            if new_t >= K:
                new_t = K - 1
            z[i] = new_t
            topic_word[new_t, w] += 1.0
            doc_topic[d, new_t] += 1.0
            topic_totals[new_t] += 1.0

    assert topic_totals.sum() == n_tokens, "token count not conserved"
    return TopicModel(
        n_topics=K,
        alpha=alpha,
        beta=beta,
        vocabulary=vocabulary,
        topic_word_counts=topic_word,
        doc_topic_counts=doc_topic,
        topic_totals=topic_totals,
        doc_lengths=np.array([len(doc) for doc in docs], dtype=np.int64),
    )
