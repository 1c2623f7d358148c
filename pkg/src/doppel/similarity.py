"""Profile similarity scoring and the impersonator verdict.

A candidate is compared to a genuine account on three text metrics
(character-bigram cosine of username, full name, biography) and a photo
verdict supplied by an external oracle. One text metric at or above the
threshold, or a photo match, is enough to call the candidate an
impersonator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DataError
from .records import ProfileRecord

DEFAULT_THRESHOLD = 0.30

_SEPARATORS = set("_.")


@dataclass
class SimilarityReport:
    """Per-metric scores against one genuine account plus the verdict."""

    genuine_target: str
    sim_username: float
    sim_full_name: float
    sim_biography: float
    photo_similar: bool
    similar_feature_count: int
    is_impersonator: bool


def _bigrams(text):
    chars = [
        ch for ch in text.lower()
        if ch not in _SEPARATORS and not ch.isspace()
    ]
    return {"".join(chars[i:i + 2]) for i in range(len(chars) - 1)}


def text_cosine(a: str, b: str) -> float:
    """Cosine of binary character-bigram presence vectors.

    Lowercases and strips '_', '.' and whitespace first, so handle
    variants like "name__x" and "namex" compare as intended. Either side
    producing no bigrams scores 0.
    """
    ba, bb = _bigrams(a), _bigrams(b)
    if not ba or not bb:
        return 0.0
    return len(ba & bb) / math.sqrt(len(ba) * len(bb))


class PhotoOracle:
    """Lookup table of precomputed photo-pair verdicts.

    The pipeline never runs face models itself; it consumes verdicts
    produced elsewhere. Lookups are symmetric in the pair. Misses count
    as non-matches and are tallied in `misses`.
    """

    def __init__(self, pairs=None):
        self._pairs = dict(pairs or {})
        self.misses = 0

    @classmethod
    def from_file(cls, path):
        """Load lines of `photo_id_a TAB photo_id_b TAB {0|1}`."""
        pairs = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 3 or parts[2] not in ("0", "1"):
                    raise DataError("expected `a TAB b TAB {0|1}`", lineno, path)
                pairs[(parts[0], parts[1])] = parts[2] == "1"
        return cls(pairs)

    def lookup(self, photo_a, photo_b) -> bool:
        if (photo_a, photo_b) in self._pairs:
            return self._pairs[(photo_a, photo_b)]
        if (photo_b, photo_a) in self._pairs:
            return self._pairs[(photo_b, photo_a)]
        self.misses += 1
        return False


def photo_similar(candidate: ProfileRecord, genuine: ProfileRecord, oracle: PhotoOracle) -> bool:
    """Oracle verdict for the pair; a missing photo on either side is False."""
    if candidate.photo_id is None or genuine.photo_id is None:
        return False
    return oracle.lookup(candidate.photo_id, genuine.photo_id)


def assess_profile(
    candidate: ProfileRecord,
    genuine: ProfileRecord,
    threshold: float = DEFAULT_THRESHOLD,
    oracle: PhotoOracle | None = None,
) -> SimilarityReport:
    """Score candidate vs one genuine account and issue the verdict."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    if oracle is None:
        oracle = PhotoOracle()
    sims = (
        text_cosine(candidate.username, genuine.username),
        text_cosine(candidate.full_name, genuine.full_name),
        text_cosine(candidate.biography, genuine.biography),
    )
    photo = photo_similar(candidate, genuine, oracle)
    count = sum(1 for s in sims if s >= threshold) + (1 if photo else 0)
    return SimilarityReport(
        genuine_target=genuine.username,
        sim_username=sims[0],
        sim_full_name=sims[1],
        sim_biography=sims[2],
        photo_similar=photo,
        similar_feature_count=count,
        is_impersonator=count >= 1,
    )


def best_match(
    candidate: ProfileRecord,
    genuines: list[ProfileRecord],
    threshold: float = DEFAULT_THRESHOLD,
    oracle: PhotoOracle | None = None,
) -> tuple[SimilarityReport, list[SimilarityReport]]:
    """Assess against every genuine account; the report with the highest

    similar_feature_count (ties broken by sim_username, then list order)
    names the candidate's genuine target."""
    if not genuines:
        raise ValueError("no genuine accounts to match against")
    reports = [assess_profile(candidate, g, threshold, oracle) for g in genuines]
    best = max(
        range(len(reports)),
        key=lambda i: (reports[i].similar_feature_count, reports[i].sim_username, -i),
    )
    return reports[best], reports


def msf_lsf(reports: list[SimilarityReport]) -> tuple[int, int]:
    """Most / least similar-feature counts across one candidate's targets.

    Targets with zero similar features are ignored for the minimum unless
    every target is zero.
    """
    if not reports:
        raise ValueError("no similarity reports")
    counts = [r.similar_feature_count for r in reports]
    msf = max(counts)
    nonzero = [c for c in counts if c > 0]
    lsf = min(nonzero) if nonzero else 0
    return msf, lsf
