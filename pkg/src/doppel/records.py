"""Profile and post records plus their JSONL wire format.

The JSONL field names mirror the dataclass fields one to one. Loading
validates every line before anything is returned, so a bad line never
leaves a half-ingested dataset behind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

from .errors import DataError

MEDIA_TYPES = ("image", "video")


@dataclass
class ProfileRecord:
    """One account's public metadata."""

    username: str
    full_name: str = ""
    biography: str = ""
    follower_count: int = 0
    followee_count: int = 0
    media_count: int = 0
    is_private: bool = False
    is_verified: bool = False
    has_external_url: bool = False
    account_age_days: int = 0
    photo_id: str | None = None

    def validate(self):
        if not self.username:
            raise ValueError("username must be non-empty")
        for name in ("follower_count", "followee_count", "media_count", "account_age_days"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass
class PostRecord:
    """One post's caption, tags, engagement and media metadata."""

    publisher_id: str
    caption: str = ""
    hashtags: list[str] = field(default_factory=list)
    mentions: list[str] = field(default_factory=list)
    tagged_users: list[str] = field(default_factory=list)
    like_count: int = 0
    comment_count: int = 0
    media_type: str = "image"
    emoji_count: int = 0
    has_url: bool = False
    timestamp: int = 0
    post_id: str = ""

    def validate(self):
        if not self.publisher_id:
            raise ValueError("publisher_id must be non-empty")
        for name in ("like_count", "comment_count", "emoji_count"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.media_type not in MEDIA_TYPES:
            raise ValueError(f"media_type must be one of {MEDIA_TYPES}")


def _load_jsonl(path, record_cls):
    """Parse and validate a whole JSONL file; raise with the line number

    of the first bad line and return nothing partial."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                if not isinstance(payload, dict):
                    raise ValueError("line is not a JSON object")
                record = record_cls(**payload)
                record.validate()
            except (ValueError, TypeError) as exc:
                raise DataError(str(exc), line_number=lineno, path=path) from exc
            records.append(record)
    return records


def load_profiles(path) -> list[ProfileRecord]:
    return _load_jsonl(path, ProfileRecord)


def load_posts(path) -> list[PostRecord]:
    return _load_jsonl(path, PostRecord)


def dump_jsonl(records, path):
    """Write records as one JSON object per line, keys in field order."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(asdict(record), ensure_ascii=False) + "\n")
