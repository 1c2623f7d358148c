import math

import numpy as np
import pytest

from doppel.records import ProfileRecord
from doppel.similarity import (
    PhotoOracle,
    SimilarityReport,
    assess_profile,
    best_match,
    msf_lsf,
    photo_similar,
    text_cosine,
)


def profile(username, full_name="", biography="", photo_id=None):
    return ProfileRecord(username=username, full_name=full_name,
                         biography=biography, photo_id=photo_id)


class TestTextCosine:
    def test_identical(self):
        assert text_cosine("barackobama", "barackobama") == 1.0

    def test_disjoint(self):
        assert text_cosine("abcd", "wxyz") == 0.0

    def test_shared_bigrams(self):
        # {ab,bc,cd} vs {bc,cd,de}: 2 shared / sqrt(3*3)
        assert abs(text_cosine("abcd", "bcde") - 2 / 3) < 1e-12

    def test_separator_stripping(self):
        assert text_cosine("@barack__obama", "@barackobama") == 1.0

    def test_empty_inputs(self):
        assert text_cosine("", "abc") == 0.0
        assert text_cosine("a", "ab") == 0.0  # single char has no bigram

    def test_symmetry_randomized(self):
        rng = np.random.default_rng(2)
        alphabet = "abcdefgh_. "
        for _ in range(500):
            a = "".join(rng.choice(list(alphabet), size=rng.integers(0, 12)))
            b = "".join(rng.choice(list(alphabet), size=rng.integers(0, 12)))
            assert text_cosine(a, b) == text_cosine(b, a)
            assert 0.0 <= text_cosine(a, b) <= 1.0 + 1e-12

    def test_self_similarity(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            s = "".join(rng.choice(list("abcdefgh"), size=rng.integers(2, 12)))
            assert abs(text_cosine(s, s) - 1.0) < 1e-12


class TestPhotoOracle:
    def test_self_pair(self):
        oracle = PhotoOracle({("A", "A"): True})
        assert photo_similar(profile("x", photo_id="A"), profile("g", photo_id="A"), oracle)

    def test_missing_photo(self):
        oracle = PhotoOracle({("A", "B"): True})
        assert not photo_similar(profile("x"), profile("g", photo_id="B"), oracle)

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "oracle.tsv"
        path.write_text("A\tB\t1\nA\tC\t0\n")
        oracle = PhotoOracle.from_file(path)
        assert photo_similar(profile("x", photo_id="A"), profile("g", photo_id="B"), oracle)
        assert not photo_similar(profile("x", photo_id="A"), profile("g", photo_id="C"), oracle)

    def test_symmetric_lookup(self):
        oracle = PhotoOracle({("A", "B"): True})
        assert oracle.lookup("B", "A") is True

    def test_miss_counter(self):
        oracle = PhotoOracle({})
        assert oracle.lookup("A", "B") is False
        assert oracle.misses == 1


class TestAssessProfile:
    def test_nothing_similar(self):
        report = assess_profile(profile("aaaa"), profile("zzzz"))
        assert not report.is_impersonator
        assert report.similar_feature_count == 0

    def test_one_text_metric_suffices(self):
        report = assess_profile(profile("barack_obama"), profile("barackobama"))
        assert report.sim_username >= 0.30
        assert report.is_impersonator

    def test_photo_alone_suffices(self):
        oracle = PhotoOracle({("P1", "P2"): True})
        report = assess_profile(
            profile("aaaa", photo_id="P1"), profile("zzzz", photo_id="P2"), oracle=oracle
        )
        assert report.sim_username == 0.0
        assert report.photo_similar
        assert report.similar_feature_count == 1
        assert report.is_impersonator

    def test_count_invariant(self):
        report = assess_profile(
            profile("barackobama", "Barack Obama"), profile("barack_obama", "Barack Obama")
        )
        text_hits = sum(
            1 for s in (report.sim_username, report.sim_full_name, report.sim_biography)
            if s >= 0.30
        )
        assert report.similar_feature_count == text_hits + int(report.photo_similar)

    def test_threshold_monotonicity(self):
        rng = np.random.default_rng(4)
        for _ in range(300):
            a = "".join(rng.choice(list("abcdef"), size=8))
            b = "".join(rng.choice(list("abcdef"), size=8))
            low = assess_profile(profile(a), profile(b), threshold=0.2)
            high = assess_profile(profile(a), profile(b), threshold=0.6)
            # raising the threshold can never create an impersonator
            assert not (high.is_impersonator and not low.is_impersonator)

    def test_below_threshold_not_impersonator(self):
        rng = np.random.default_rng(5)
        checked = 0
        for _ in range(2000):
            a = "".join(rng.choice(list("abcdefghijkl"), size=10))
            b = "".join(rng.choice(list("mnopqrstuvwx"), size=10))
            report = assess_profile(profile(a), profile(b), threshold=0.3)
            sims = (report.sim_username, report.sim_full_name, report.sim_biography)
            if all(s < 0.3 for s in sims) and not report.photo_similar:
                assert not report.is_impersonator
                checked += 1
        assert checked > 1000

    def test_bad_threshold(self):
        with pytest.raises(ValueError):
            assess_profile(profile("a"), profile("b"), threshold=0.0)


class TestMsfLsf:
    def _reports(self, counts):
        return [
            SimilarityReport(
                genuine_target=f"t{i}", sim_username=0, sim_full_name=0,
                sim_biography=0, photo_similar=False,
                similar_feature_count=c, is_impersonator=c >= 1,
            )
            for i, c in enumerate(counts)
        ]

    def test_single_target(self):
        assert msf_lsf(self._reports([3])) == (3, 3)

    def test_max_min(self):
        assert msf_lsf(self._reports([1, 3, 2])) == (3, 1)

    def test_never_similar(self):
        assert msf_lsf(self._reports([0, 0])) == (0, 0)

    def test_zero_targets_excluded_from_min(self):
        assert msf_lsf(self._reports([0, 2])) == (2, 2)

    def test_empty_errors(self):
        with pytest.raises(ValueError, match="no similarity reports"):
            msf_lsf([])


class TestBestMatch:
    def test_highest_count_wins(self):
        genuines = [
            profile("zzzzzz", "Zz Zz"),
            profile("barackobama", "Barack Obama"),
        ]
        candidate = profile("barack_obama", "Barack Obama")
        best, reports = best_match(candidate, genuines)
        assert best.genuine_target == "barackobama"
        assert len(reports) == 2
