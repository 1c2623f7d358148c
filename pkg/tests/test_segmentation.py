import numpy as np
import pytest

from doppel.segmentation import default_dictionary, load_dictionary, segment_compound


@pytest.fixture(scope="module")
def dictionary():
    return default_dictionary()


def test_known_phrase(dictionary):
    assert segment_compound("makeamericagreatagain", dictionary) == [
        "make", "america", "great", "again",
    ]


def test_single_dictionary_word(dictionary):
    assert segment_compound("obama", dictionary) == ["obama"]


def test_two_word_handle(dictionary):
    # the two-word parse must be cheaper than one unknown token
    assert segment_compound("ladygaga", dictionary) == ["lady", "gaga"]


def test_unknown_token_kept_whole(dictionary):
    assert segment_compound("xqzwv", dictionary) == ["xqzwv"]


def test_unknown_prefix_splits_off(dictionary):
    assert segment_compound("xqzwmake", dictionary) == ["xqzw", "make"]


def test_empty(dictionary):
    assert segment_compound("", dictionary) == []


def test_concatenation_property(dictionary):
    rng = np.random.default_rng(0)
    words = list(dictionary.ranks)[:500]
    for _ in range(200):
        parts = [words[i] for i in rng.integers(0, len(words), size=rng.integers(1, 4))]
        if rng.random() < 0.3:
            parts.append("zq" + "".join(chr(97 + i) for i in rng.integers(0, 26, size=3)))
        compound = "".join(parts)
        segments = segment_compound(compound, dictionary)
        assert "".join(segments) == compound


def test_deterministic(dictionary):
    word = "teamamericarunner"
    assert segment_compound(word, dictionary) == segment_compound(word, dictionary)


def test_case_insensitive_rank_lookup(dictionary):
    assert dictionary.rank("Make") == dictionary.rank("make")
    assert "MAKE" in dictionary


def test_ranks_unique_positive(dictionary):
    ranks = list(dictionary.ranks.values())
    assert len(set(ranks)) == len(ranks)
    assert min(ranks) == 1
    assert max(ranks) == dictionary.total


def test_load_dictionary_from_file(tmp_path):
    path = tmp_path / "words.txt"
    path.write_text("alpha\nbeta\ngamma\nbeta\n")
    d = load_dictionary(path)
    assert d.total == 3
    assert d.rank("beta") == 2
    assert segment_compound("alphabeta", d) == ["alpha", "beta"]
