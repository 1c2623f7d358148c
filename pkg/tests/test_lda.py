import numpy as np
import pytest

from doppel.lda import TopicModel, lda_fit


def separable_corpus(n_docs=40, seed=0):
    """Two sub-corpora with disjoint vocabularies."""
    rng = np.random.default_rng(seed)
    sports = ["goal", "match", "team", "score", "league", "coach", "winger"]
    cooking = ["recipe", "oven", "butter", "flour", "saute", "spice", "whisk"]
    docs = []
    for d in range(n_docs):
        pool = sports if d % 2 == 0 else cooking
        docs.append([pool[i] for i in rng.integers(0, len(pool), size=12)])
    return docs, set(sports), set(cooking)


class TestLdaFit:
    def test_topic_purity_on_separable_corpus(self):
        docs, sports, cooking = separable_corpus()
        model = lda_fit(docs, n_topics=2, iters=150, seed=4)
        for topic in range(2):
            top5 = model.top_words(topic, 5)
            from_sports = sum(1 for w in top5 if w in sports)
            from_cooking = sum(1 for w in top5 if w in cooking)
            purity = max(from_sports, from_cooking) / 5
            assert purity >= 0.9

    def test_k1_degenerate(self):
        docs = [["alpha", "beta"], ["beta", "gamma"], ["alpha"]]
        model = lda_fit(docs, n_topics=1, iters=10, seed=0)
        assert model.doc_topic_counts.shape == (3, 1)
        np.testing.assert_allclose(model.doc_topic_dist(), 1.0)

    def test_deterministic(self):
        docs, _, _ = separable_corpus(seed=2)
        m1 = lda_fit(docs, n_topics=2, iters=50, seed=9)
        m2 = lda_fit(docs, n_topics=2, iters=50, seed=9)
        np.testing.assert_array_equal(m1.topic_word_counts, m2.topic_word_counts)
        np.testing.assert_array_equal(m1.doc_topic_counts, m2.doc_topic_counts)

    def test_doc_topic_distributions_sum_to_one(self):
        docs, _, _ = separable_corpus(seed=3)
        model = lda_fit(docs, n_topics=4, iters=30, seed=1)
        theta = model.doc_topic_dist()
        np.testing.assert_allclose(theta.sum(axis=1), 1.0, atol=1e-9)
        phi = model.topic_word_dist()
        np.testing.assert_allclose(phi.sum(axis=1), 1.0, atol=1e-9)

    def test_token_count_conserved(self):
        docs, _, _ = separable_corpus(seed=5)
        total = sum(len(d) for d in docs)
        model = lda_fit(docs, n_topics=3, iters=25, seed=2)
        assert model.topic_word_counts.sum() == total
        assert model.doc_topic_counts.sum() == total
        assert model.topic_totals.sum() == total

    def test_corpus_too_small(self):
        with pytest.raises(ValueError):
            lda_fit([["a", "b"]], n_topics=5, iters=5, seed=0)

    def test_vocab_too_small(self):
        docs = [["a"], ["a"], ["a"], ["a"], ["a"]]
        with pytest.raises(ValueError):
            lda_fit(docs, n_topics=3, iters=5, seed=0)

    def test_default_alpha(self):
        docs, _, _ = separable_corpus()
        model = lda_fit(docs, n_topics=5, iters=5, seed=0)
        assert model.alpha == pytest.approx(50.0 / 5)


class TestInference:
    def test_infer_matches_training_side(self):
        docs, sports, cooking = separable_corpus()
        model = lda_fit(docs, n_topics=2, iters=150, seed=4)
        sports_topic = model.dominant_topic(["goal", "match", "team"])
        cooking_topic = model.dominant_topic(["recipe", "oven", "butter"])
        assert sports_topic != cooking_topic

    def test_infer_sums_to_one(self):
        docs, _, _ = separable_corpus()
        model = lda_fit(docs, n_topics=2, iters=50, seed=4)
        theta = model.infer(["goal", "unknownword"])
        assert theta.sum() == pytest.approx(1.0, abs=1e-9)

    def test_save_load_round_trip(self, tmp_path):
        docs, _, _ = separable_corpus()
        model = lda_fit(docs, n_topics=2, iters=20, seed=4)
        path = tmp_path / "topics.json"
        model.save(path)
        loaded = TopicModel.load(path)
        np.testing.assert_array_equal(loaded.topic_word_counts, model.topic_word_counts)
        assert loaded.vocabulary == model.vocabulary
        assert loaded.dominant_topic(["goal"]) == model.dominant_topic(["goal"])
