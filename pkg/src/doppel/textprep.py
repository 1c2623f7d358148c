"""Deterministic text normalization for captions, biographies and handles.

Pipeline order (entity replacement -> emoji conversion -> tag extraction ->
normalization) keeps URL fragments and markers out of the token stream.
All functions are pure; loaded tables are immutable after load.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources as importlib_resources

from .porter import stem_fixed_point

# Documented entity patterns. Tests cite these constants, not intuition.
URL_RE = re.compile(r"(?:https?://|www\.)\S+")
EMAIL_RE = re.compile(r"[\w.+-]+@[\w][\w-]*\.[\w.-]+")
PHONE_RE = re.compile(r"\+?\d[\d\s().-]{6,}\d")
NEWLINE_RE = re.compile(r"\r\n|\r|\n")

HASHTAG_RE = re.compile(r"#([A-Za-z0-9_]+)")
MENTION_RE = re.compile(r"@([A-Za-z0-9_]+(?:\.[A-Za-z0-9_]+)*)")

# Emoticon words are pinned here and in the test fixtures.
EMOTICON_WORDS = {
    ":)": "smile", ":-)": "smile", "=)": "smile",
    ":(": "sad", ":-(": "sad",
    ";)": "wink", ";-)": "wink",
    ":D": "laugh", ":-D": "laugh",
    ":P": "tongue", ":p": "tongue", ":-P": "tongue",
    ":O": "surprise", ":o": "surprise",
    "<3": "heart",
}

# Codepoint ranges treated as emoji for the unmapped-emoji fallback.
EMOJI_RANGES = (
    (0x2600, 0x27BF),
    (0x1F300, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F900, 0x1F9FF),
    (0x1FA70, 0x1FAFF),
)


def _data_text(name):
    return importlib_resources.files("doppel.data").joinpath(name).read_text("utf-8")


@lru_cache(maxsize=1)
def load_stopwords():
    """Bundled English stopword set, one word per line."""
    return frozenset(
        line.strip() for line in _data_text("stopwords.txt").splitlines() if line.strip()
    )


@lru_cache(maxsize=1)
def load_emoji_names():
    """Bundled emoji table: codepoint (hex) TAB lowercase name."""
    table = {}
    for line in _data_text("emoji_names.tsv").splitlines():
        if not line.strip():
            continue
        code, name = line.split("\t")
        table[int(code, 16)] = name
    return table


def _is_emoji(ch):
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in EMOJI_RANGES)


def _splice(parts, text, start, end, word):
    """Replace text[start:end] with word, space-separated from neighbours."""
    if start > 0 and not text[start - 1].isspace():
        word = " " + word
    if end < len(text) and not text[end].isspace():
        word = word + " "
    parts.append(word)


def _sub_spaced(pattern, text, word):
    out = []
    pos = 0
    for m in pattern.finditer(text):
        out.append(text[pos:m.start()])
        _splice(out, text, m.start(), m.end(), word)
        pos = m.end()
    out.append(text[pos:])
    return "".join(out)


def replace_entities(text: str) -> str:
    """Replace URLs, emails, phone numbers and newlines with marker words.

    Order matters: URLs first so their digits cannot be half-eaten by the
    phone pattern. Marker words are space-separated from adjacent non-space
    characters so later tokenization keeps them intact.
    """
    text = _sub_spaced(URL_RE, text, "website")
    text = _sub_spaced(EMAIL_RE, text, "email")
    text = _sub_spaced(PHONE_RE, text, "phones")
    text = _sub_spaced(NEWLINE_RE, text, "line")
    return text


def demojize(text: str) -> str:
    """Convert emoji codepoints and common emoticons to words.

    Mapped emoji become their lowercase table name; emoji inside the known
    ranges but missing from the table become the fallback word "emoji".
    Emoticons are replaced only at non-alphanumeric boundaries.
    """
    names = load_emoji_names()
    out = []
    for i, ch in enumerate(text):
        cp = ord(ch)
        if cp in names or _is_emoji(ch):
            word = names.get(cp, "emoji")
            _splice(out, text, i, i + 1, word)
        else:
            out.append(ch)
    text = "".join(out)

    for emoticon, word in sorted(EMOTICON_WORDS.items(), key=lambda kv: -len(kv[0])):
        pattern = re.compile(
            r"(?<![A-Za-z0-9])" + re.escape(emoticon) + r"(?![A-Za-z0-9])"
        )
        text = _sub_spaced(pattern, text, word)
    return text


def normalize(text: str, stopwords=None, stemmer=stem_fixed_point) -> list[str]:
    """Lowercase, strip punctuation, drop stopwords and short tokens, stem.

    Expects entity replacement and demojization already applied. Tokens
    shorter than three characters are dropped before stemming; stems that
    end up short or equal to a stopword are dropped too, so running the
    output back through normalize() is a no-op.
    """
    if stopwords is None:
        stopwords = load_stopwords()
    lowered = text.lower()
    cleaned = "".join(ch if ch.isalnum() else " " for ch in lowered)
    out = []
    for token in cleaned.split():
        if token in stopwords or len(token) < 3:
            continue
        stemmed = stemmer(token)
        if len(stemmed) < 3 or stemmed in stopwords:
            continue
        out.append(stemmed)
    return out


def extract_tags(text: str) -> tuple[list[str], list[str]]:
    """Pull '#hashtag' and '@mention' tokens, order preserved, lowercase."""
    hashtags = [m.group(1).lower() for m in HASHTAG_RE.finditer(text)]
    mentions = [m.group(1).lower() for m in MENTION_RE.finditer(text)]
    return hashtags, mentions


def count_emoji(text: str) -> int:
    """Number of characters inside the emoji codepoint ranges."""
    return sum(1 for ch in text if _is_emoji(ch))
